// ziptrace command-line front end. Talks to the library through the C API only.
#include <ziptrace/ziptrace.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kClean = 0, kFound = 1, kUsage = 2, kMalformed = 3 };

struct Failure {
  int code;
  std::string message;
};

int exit_for(zt_status s) {
  switch (s) {
    case ZT_OK:
      return kClean;
    case ZT_ERR_PARSE:
    case ZT_ERR_INVALID_GRAMMAR:
      return kMalformed;
    default:
      return kUsage;
  }
}

void check(zt_status s) {
  if (s != ZT_OK) throw Failure{exit_for(s), zt_last_error()};
}

struct Deleter {
  void operator()(zt_trace* p) const { zt_trace_free(p); }
  void operator()(zt_slp* p) const { zt_slp_free(p); }
  void operator()(zt_report* p) const { zt_report_free(p); }
  void operator()(char* p) const { zt_string_free(p); }
};
using TracePtr = std::unique_ptr<zt_trace, Deleter>;
using SlpPtr = std::unique_ptr<zt_slp, Deleter>;
using ReportPtr = std::unique_ptr<zt_report, Deleter>;
using StrPtr = std::unique_ptr<char, Deleter>;

template <class F>
std::string take_string(F&& f) {
  char* raw = nullptr;
  check(f(&raw));
  StrPtr s(raw);
  return raw ? std::string(raw) : std::string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kUsage, "cannot write '" + path + "'"};
  out << text;
}

// A grammar file starts with the `slp v1` header after any comments.
bool looks_like_slp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    return line.substr(b, e - b + 1) == "slp v1";
  }
  return false;
}

TracePtr parse_trace_text(const std::string& text) {
  zt_trace* t = nullptr;
  check(zt_trace_parse(text.data(), text.size(), &t));
  return TracePtr(t);
}

SlpPtr parse_slp_text(const std::string& text) {
  zt_slp* g = nullptr;
  check(zt_slp_parse(text.data(), text.size(), &g));
  return SlpPtr(g);
}

// Prints diagnostics to stderr; errors (or warnings under --strict) are fatal.
void report_diagnostics(const std::string& what, const std::string& json, bool has_errors, bool strict) {
  if (json != "[]") std::cerr << what << ": " << json << "\n";
  if (has_errors || (strict && json != "[]")) throw Failure{kMalformed, what + " failed validation"};
}

void validate_trace(const zt_trace* t, const std::string& name, bool strict) {
  int errs = 0;
  auto j = take_string([&](char** out) { return zt_trace_validate_json(t, out, &errs); });
  report_diagnostics(name, j, errs != 0, strict);
}

void validate_slp(const zt_slp* g, const std::string& name, bool strict) {
  int errs = 0;
  auto j = take_string([&](char** out) { return zt_slp_validate_json(g, out, &errs); });
  report_diagnostics(name, j, errs != 0, strict);
}

SlpPtr compress(const zt_trace* t, std::size_t threshold) {
  zt_slp* g = nullptr;
  check(zt_slp_compress(t, &g));
  SlpPtr plain(g);
  if (threshold == 0) return plain;
  zt_slp* n = nullptr;
  check(zt_slp_normalize(plain.get(), threshold, &n));
  return SlpPtr(n);
}

struct GenOptions {
  std::string pattern = "random";
  uint64_t iterations = 0;
  uint32_t threads = 0, locks = 0, vars = 0;
  uint64_t seed = 1;
};

void add_gen_options(CLI::App* cmd, GenOptions& g, zt_gen_spec defaults) {
  g.iterations = defaults.iterations;
  g.threads = defaults.threads;
  g.locks = defaults.locks;
  g.vars = defaults.vars;
  g.seed = defaults.seed;
  cmd->add_option("-n,--iterations", g.iterations, "loop rounds, or event budget for random")->capture_default_str();
  cmd->add_option("--threads", g.threads, "worker threads (loops) or max threads (random)")->capture_default_str();
  cmd->add_option("--locks", g.locks)->capture_default_str();
  cmd->add_option("--vars", g.vars)->capture_default_str();
  cmd->add_option("--seed", g.seed)->capture_default_str();
}

TracePtr generate(const GenOptions& g, uint64_t seed) {
  zt_gen_spec spec;
  zt_gen_spec_default(&spec);
  spec.pattern = g.pattern.c_str();
  spec.iterations = g.iterations;
  spec.threads = g.threads;
  spec.locks = g.locks;
  spec.vars = g.vars;
  spec.seed = seed;
  zt_trace* t = nullptr;
  check(zt_gen_trace(&spec, &t));
  return TracePtr(t);
}

int cmd_compress(const std::string& in, const std::string& out, std::size_t threshold, bool strict) {
  auto trace = parse_trace_text(read_file(in));
  validate_trace(trace.get(), in, strict);
  auto g = compress(trace.get(), threshold);
  validate_slp(g.get(), out.empty() ? "output" : out, false);
  write_output(out, take_string([&](char** s) { return zt_slp_serialize(g.get(), s); }));
  auto stats = take_string([&](char** s) { return zt_slp_stats_json(g.get(), s); });
  (out.empty() || out == "-" ? std::cerr : std::cout) << stats << "\n";
  return kClean;
}

int cmd_expand(const std::string& in, const std::string& out) {
  auto g = parse_slp_text(read_file(in));
  validate_slp(g.get(), in, false);
  zt_trace* t = nullptr;
  check(zt_slp_expand(g.get(), &t));
  TracePtr trace(t);
  write_output(out, take_string([&](char** s) { return zt_trace_serialize(trace.get(), s); }));
  return kClean;
}

int cmd_analyze(const std::string& in, const std::string& engine_name, bool autoconv, bool strict,
                std::size_t threshold) {
  zt_engine engine;
  check(zt_engine_from_name(engine_name.c_str(), &engine));
  const bool wants_slp = zt_engine_is_compressed(engine);
  const std::string text = read_file(in);
  const bool is_slp = looks_like_slp(text);
  if (wants_slp != is_slp && !autoconv)
    throw Failure{kUsage, engine_name + " needs " + (wants_slp ? "a grammar" : "a trace") + " input; pass --auto to " +
                              (wants_slp ? "compress" : "expand") + " it"};

  zt_report* r = nullptr;
  if (is_slp) {
    auto g = parse_slp_text(text);
    validate_slp(g.get(), in, strict);
    if (wants_slp) {
      check(zt_analyze_slp(engine, g.get(), in.c_str(), &r));
    } else {
      zt_trace* t = nullptr;
      check(zt_slp_expand(g.get(), &t));
      TracePtr trace(t);
      validate_trace(trace.get(), in, strict);
      check(zt_analyze_trace(engine, trace.get(), in.c_str(), &r));
    }
  } else {
    auto trace = parse_trace_text(text);
    validate_trace(trace.get(), in, strict);
    if (wants_slp) {
      auto g = compress(trace.get(), threshold);
      check(zt_analyze_slp(engine, g.get(), in.c_str(), &r));
    } else {
      check(zt_analyze_trace(engine, trace.get(), in.c_str(), &r));
    }
  }
  ReportPtr report(r);
  std::cout << take_string([&](char** s) { return zt_report_json(report.get(), s); }) << "\n";
  return zt_report_found(report.get()) ? kFound : kClean;
}

// Returns true when every engine agrees on this trace.
bool verify_one(const zt_trace* t, const std::string& name, std::size_t threshold) {
  int agree = 0;
  char* json = nullptr;
  char* small = nullptr;
  check(zt_verify_trace(t, threshold, name.c_str(), &agree, &json, &small));
  StrPtr j(json), m(small);
  std::cout << json << "\n";
  if (!agree) {
    std::cerr << "disagreement on " << name << "; minimized trace:\n" << (small ? small : "") << "\n";
  }
  return agree != 0;
}

int cmd_verify(const std::vector<std::string>& files, unsigned runs, const GenOptions& gen, std::size_t threshold) {
  std::size_t bad = 0;
  if (!files.empty()) {
    for (const auto& f : files) {
      const std::string text = read_file(f);
      TracePtr trace;
      if (looks_like_slp(text)) {
        auto g = parse_slp_text(text);
        validate_slp(g.get(), f, false);
        zt_trace* t = nullptr;
        check(zt_slp_expand(g.get(), &t));
        trace.reset(t);
      } else {
        trace = parse_trace_text(text);
      }
      validate_trace(trace.get(), f, false);
      if (!verify_one(trace.get(), f, threshold)) ++bad;
    }
  } else {
    for (unsigned k = 0; k < runs; ++k) {
      const uint64_t seed = gen.seed + k;
      auto trace = generate(gen, seed);
      if (!verify_one(trace.get(), gen.pattern + ":seed=" + std::to_string(seed), threshold)) ++bad;
    }
  }
  if (bad) std::cerr << bad << " input(s) with disagreements\n";
  return bad ? kFound : kClean;
}

int cmd_gen(const GenOptions& gen, const std::string& out) {
  auto trace = generate(gen, gen.seed);
  write_output(out, take_string([&](char** s) { return zt_trace_serialize(trace.get(), s); }));
  return kClean;
}

std::vector<zt_engine> parse_engine_list(const std::string& list) {
  std::vector<zt_engine> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    zt_engine e;
    check(zt_engine_from_name(name.c_str(), &e));
    out.push_back(e);
  }
  return out;
}

int cmd_bench(const std::vector<std::string>& files, const GenOptions& gen, const std::string& engines,
              unsigned repeat, std::size_t threshold) {
  auto es = parse_engine_list(engines);
  auto run = [&](const zt_trace* t, const std::string& name) {
    auto lines = take_string([&](char** s) {
      return zt_bench_trace(t, es.data(), es.size(), repeat, threshold, name.c_str(), s);
    });
    std::cout << lines;
  };
  if (!files.empty()) {
    for (const auto& f : files) {
      const std::string text = read_file(f);
      TracePtr trace;
      if (looks_like_slp(text)) {
        auto g = parse_slp_text(text);
        zt_trace* t = nullptr;
        check(zt_slp_expand(g.get(), &t));
        trace.reset(t);
      } else {
        trace = parse_trace_text(text);
      }
      validate_trace(trace.get(), f, false);
      run(trace.get(), f);
    }
  } else {
    auto trace = generate(gen, gen.seed);
    run(trace.get(), gen.pattern + ":n=" + std::to_string(gen.iterations));
  }
  return kClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Race and lockset analysis on grammar-compressed concurrency traces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", zt_version());

  zt_gen_spec defaults;
  zt_gen_spec_default(&defaults);
  std::size_t threshold = 8;
  bool strict = false;

  std::string in, out;
  auto* compress_cmd = app.add_subcommand("compress", "compress a trace into a grammar");
  compress_cmd->add_option("input", in, "trace file")->required();
  compress_cmd->add_option("-o,--output", out, "grammar file (default stdout)");
  compress_cmd->add_option("--normalize-threshold", threshold, "split terminal runs of this length; 0 disables")
      ->capture_default_str();
  compress_cmd->add_flag("--strict", strict, "treat validation warnings as errors");

  auto* expand_cmd = app.add_subcommand("expand", "expand a grammar back into a trace");
  expand_cmd->add_option("input", in, "grammar file")->required();
  expand_cmd->add_option("-o,--output", out, "trace file (default stdout)");

  std::string engine;
  bool autoconv = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "run one engine and print a JSON report");
  analyze_cmd->add_option("input", in, "trace or grammar file")->required();
  analyze_cmd->add_option("-e,--engine", engine, "hb-compressed, hb-vc, hb-goldilocks, ls-compressed or ls-eraser")
      ->required();
  analyze_cmd->add_flag("--auto", autoconv, "compress or expand the input to suit the engine");
  analyze_cmd->add_flag("--strict", strict, "treat validation warnings as errors");
  analyze_cmd->add_option("--normalize-threshold", threshold)->capture_default_str();

  std::vector<std::string> files;
  unsigned runs = 500;
  GenOptions verify_gen;
  auto* verify_cmd = app.add_subcommand("verify", "cross-check all engines and the oracles");
  verify_cmd->add_option("inputs", files, "trace or grammar files; random traces when omitted");
  verify_cmd->add_option("--runs", runs, "random traces to generate")->capture_default_str();
  add_gen_options(verify_cmd, verify_gen, {"random", 200, 4, 3, 4, 1});
  verify_cmd->add_option("--normalize-threshold", threshold)->capture_default_str();

  GenOptions gen_opts;
  gen_opts.pattern = defaults.pattern;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic trace");
  gen_cmd->add_option("-p,--pattern", gen_opts.pattern, "inc-loop, lock-loop or random")->capture_default_str();
  add_gen_options(gen_cmd, gen_opts, defaults);
  gen_cmd->add_option("-o,--output", out, "trace file (default stdout)");

  GenOptions bench_gen;
  bench_gen.pattern = "inc-loop";
  std::string engines = "hb-compressed,hb-vc,hb-goldilocks,ls-compressed,ls-eraser";
  unsigned repeat = 3;
  auto* bench_cmd = app.add_subcommand("bench", "time engines; one JSON line per engine per input");
  bench_cmd->add_option("inputs", files, "trace or grammar files; a generated trace when omitted");
  bench_cmd->add_option("-p,--pattern", bench_gen.pattern)->capture_default_str();
  add_gen_options(bench_cmd, bench_gen, defaults);
  bench_cmd->add_option("--engines", engines, "comma-separated engine names")->capture_default_str();
  bench_cmd->add_option("--repeat", repeat, "runs per engine; the median is reported")->capture_default_str();
  bench_cmd->add_option("--normalize-threshold", threshold)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kClean : kUsage;
  }

  const bool may_disable = *compress_cmd || *analyze_cmd;
  if (threshold == 1 || (threshold == 0 && !may_disable)) {
    std::cerr << "error: --normalize-threshold must be at least 2" << (may_disable ? " (or 0)" : "") << "\n";
    return kUsage;
  }

  try {
    if (*compress_cmd) return cmd_compress(in, out, threshold, strict);
    if (*expand_cmd) return cmd_expand(in, out);
    if (*analyze_cmd) return cmd_analyze(in, engine, autoconv, strict, threshold);
    if (*verify_cmd) return cmd_verify(files, runs, verify_gen, threshold);
    if (*gen_cmd) return cmd_gen(gen_opts, out);
    if (*bench_cmd) return cmd_bench(files, bench_gen, engines, repeat, threshold);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kUsage;
}
