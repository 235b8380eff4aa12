#include "ziptrace/ziptrace.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <new>

#include "engines.hpp"
#include "generator.hpp"
#include "hb_baseline.hpp"
#include "sequitur.hpp"

struct zt_trace {
  ziptrace::Trace trace;
};

struct zt_slp {
  ziptrace::Slp slp;
};

struct zt_report {
  ziptrace::Report report;
  ziptrace::Symbols symbols;
};

namespace {

using namespace ziptrace;
using json = nlohmann::ordered_json;

thread_local std::string g_last_error;

zt_status fail(zt_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Maps the exception in flight to a status code.
zt_status translate() {
  try {
    throw;
  } catch (const ParseError& e) {
    return fail(ZT_ERR_PARSE, e.what());
  } catch (const GrammarError& e) {
    return fail(ZT_ERR_INVALID_GRAMMAR, e.what());
  } catch (const CapExceeded& e) {
    return fail(ZT_ERR_CAP_EXCEEDED, e.what());
  } catch (const UsageError& e) {
    return fail(ZT_ERR_INVALID_ARG, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(ZT_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ZT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ZT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ZT_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
zt_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return ZT_OK;
  } catch (...) {
    return translate();
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void write_file(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure(std::string("cannot write '") + path + "'");
  out << text;
  if (!out) throw std::ios_base::failure(std::string("write failed for '") + path + "'");
}

std::string diagnostics_json(const std::vector<Diagnostic>& ds) {
  json arr = json::array();
  for (const auto& d : ds)
    arr.push_back({{"severity", d.severity == Severity::Error ? "error" : "warning"},
                   {"event", d.event},
                   {"message", d.message}});
  return arr.dump();
}

#define ZT_REQUIRE(cond, what) \
  if (!(cond)) return fail(ZT_ERR_INVALID_ARG, what)

bool valid_engine(zt_engine e) { return e >= ZT_ENGINE_HB_COMPRESSED && e <= ZT_ENGINE_LS_ERASER; }

Engine to_engine(zt_engine e) {
  switch (e) {
    case ZT_ENGINE_HB_COMPRESSED:
      return Engine::HbCompressed;
    case ZT_ENGINE_HB_VC:
      return Engine::HbVc;
    case ZT_ENGINE_HB_GOLDILOCKS:
      return Engine::HbGoldilocks;
    case ZT_ENGINE_LS_COMPRESSED:
      return Engine::LsCompressed;
    case ZT_ENGINE_LS_ERASER:
      return Engine::LsEraser;
  }
  throw UsageError("unknown engine code");
}

zt_engine from_engine(Engine e) {
  switch (e) {
    case Engine::HbCompressed:
      return ZT_ENGINE_HB_COMPRESSED;
    case Engine::HbVc:
      return ZT_ENGINE_HB_VC;
    case Engine::HbGoldilocks:
      return ZT_ENGINE_HB_GOLDILOCKS;
    case Engine::LsCompressed:
      return ZT_ENGINE_LS_COMPRESSED;
    case Engine::LsEraser:
      return ZT_ENGINE_LS_ERASER;
  }
  return ZT_ENGINE_HB_VC;
}

}  // namespace

extern "C" {

const char* zt_last_error(void) { return g_last_error.c_str(); }
const char* zt_version(void) { return "1.0.0"; }
void zt_string_free(char* s) { std::free(s); }

zt_status zt_trace_parse(const char* text, size_t len, zt_trace** out) {
  ZT_REQUIRE(out && (text || len == 0), "null argument");
  return guarded([&] { *out = new zt_trace{parse_trace(std::string_view(text ? text : "", len))}; });
}

zt_status zt_trace_load(const char* path, zt_trace** out) {
  ZT_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new zt_trace{load_trace(path)}; });
}

zt_status zt_trace_serialize(const zt_trace* trace, char** out) {
  ZT_REQUIRE(trace && out, "null argument");
  return guarded([&] { *out = dup_string(serialize_trace(trace->trace)); });
}

zt_status zt_trace_save(const zt_trace* trace, const char* path) {
  ZT_REQUIRE(trace && path, "null argument");
  return guarded([&] { write_file(path, serialize_trace(trace->trace)); });
}

size_t zt_trace_length(const zt_trace* trace) { return trace ? trace->trace.size() : 0; }

zt_status zt_trace_stats_json(const zt_trace* trace, char** out) {
  ZT_REQUIRE(trace && out, "null argument");
  return guarded([&] {
    auto st = trace_stats(trace->trace);
    json j{{"events", st.n_events},
           {"threads", st.threads.size()},
           {"locks", st.locks.size()},
           {"vars", st.vars.size()},
           {"max_reentrancy", st.max_reentrancy}};
    *out = dup_string(j.dump());
  });
}

zt_status zt_trace_validate_json(const zt_trace* trace, char** out, int* has_errs) {
  ZT_REQUIRE(trace && out, "null argument");
  return guarded([&] {
    auto ds = validate(trace->trace);
    if (has_errs) *has_errs = has_errors(ds) ? 1 : 0;
    *out = dup_string(diagnostics_json(ds));
  });
}

void zt_trace_free(zt_trace* trace) { delete trace; }

zt_status zt_slp_parse(const char* text, size_t len, zt_slp** out) {
  ZT_REQUIRE(out && (text || len == 0), "null argument");
  return guarded([&] { *out = new zt_slp{parse_slp(std::string_view(text ? text : "", len))}; });
}

zt_status zt_slp_load(const char* path, zt_slp** out) {
  ZT_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new zt_slp{load_slp(path)}; });
}

zt_status zt_slp_serialize(const zt_slp* slp, char** out) {
  ZT_REQUIRE(slp && out, "null argument");
  return guarded([&] { *out = dup_string(serialize_slp(slp->slp)); });
}

zt_status zt_slp_save(const zt_slp* slp, const char* path) {
  ZT_REQUIRE(slp && path, "null argument");
  return guarded([&] { write_file(path, serialize_slp(slp->slp)); });
}

zt_status zt_slp_stats_json(const zt_slp* slp, char** out) {
  ZT_REQUIRE(slp && out, "null argument");
  return guarded([&] {
    auto g = grammar_stats(slp->slp);
    json j{{"terminals", g.n_terminals},
           {"rules", g.n_nonterminals},
           {"grammar_size", g.size},
           {"expanded_length", g.expanded_length},
           {"compression_ratio", g.compression_ratio}};
    *out = dup_string(j.dump());
  });
}

zt_status zt_slp_validate_json(const zt_slp* slp, char** out, int* has_errs) {
  ZT_REQUIRE(slp && out, "null argument");
  return guarded([&] {
    auto ds = validate_slp(slp->slp);
    if (has_errs) *has_errs = has_errors(ds) ? 1 : 0;
    *out = dup_string(diagnostics_json(ds));
  });
}

zt_status zt_slp_compress(const zt_trace* trace, zt_slp** out) {
  ZT_REQUIRE(trace && out, "null argument");
  return guarded([&] { *out = new zt_slp{sequitur_compress(trace->trace)}; });
}

zt_status zt_slp_normalize(const zt_slp* slp, size_t run_threshold, zt_slp** out) {
  ZT_REQUIRE(slp && out, "null argument");
  return guarded([&] { *out = new zt_slp{normalize(slp->slp, run_threshold)}; });
}

zt_status zt_slp_expand(const zt_slp* slp, zt_trace** out) {
  ZT_REQUIRE(slp && out, "null argument");
  return guarded([&] { *out = new zt_trace{expand(slp->slp)}; });
}

void zt_slp_free(zt_slp* slp) { delete slp; }

zt_status zt_engine_from_name(const char* name, zt_engine* out) {
  ZT_REQUIRE(name && out, "null argument");
  return guarded([&] { *out = from_engine(engine_from_name(name)); });
}

const char* zt_engine_name(zt_engine engine) {
  switch (engine) {
    case ZT_ENGINE_HB_COMPRESSED:
      return "hb-compressed";
    case ZT_ENGINE_HB_VC:
      return "hb-vc";
    case ZT_ENGINE_HB_GOLDILOCKS:
      return "hb-goldilocks";
    case ZT_ENGINE_LS_COMPRESSED:
      return "ls-compressed";
    case ZT_ENGINE_LS_ERASER:
      return "ls-eraser";
  }
  return nullptr;
}

int zt_engine_is_compressed(zt_engine engine) {
  return valid_engine(engine) && engine_is_compressed(to_engine(engine)) ? 1 : 0;
}

zt_status zt_analyze_trace(zt_engine engine, const zt_trace* trace, const char* input_name, zt_report** out) {
  ZT_REQUIRE(trace && out, "null argument");
  ZT_REQUIRE(valid_engine(engine), "unknown engine code");
  return guarded([&] {
    auto r = run_on_trace(to_engine(engine), trace->trace, input_name ? input_name : "");
    *out = new zt_report{std::move(r), trace->trace.symbols()};
  });
}

zt_status zt_analyze_slp(zt_engine engine, const zt_slp* slp, const char* input_name, zt_report** out) {
  ZT_REQUIRE(slp && out, "null argument");
  ZT_REQUIRE(valid_engine(engine), "unknown engine code");
  return guarded([&] {
    auto r = run_on_slp(to_engine(engine), slp->slp, input_name ? input_name : "");
    *out = new zt_report{std::move(r), slp->slp.symbols};
  });
}

int zt_report_found(const zt_report* report) { return report && report->report.found ? 1 : 0; }
double zt_report_wall_ms(const zt_report* report) { return report ? report->report.stats.wall_ms : 0.0; }

zt_status zt_report_json(const zt_report* report, char** out) {
  ZT_REQUIRE(report && out, "null argument");
  return guarded([&] { *out = dup_string(report_json(report->report, report->symbols)); });
}

void zt_report_free(zt_report* report) { delete report; }

void zt_gen_spec_default(zt_gen_spec* spec) {
  if (!spec) return;
  GenSpec d;
  spec->pattern = "inc-loop";
  spec->iterations = d.iterations;
  spec->threads = d.threads;
  spec->locks = d.locks;
  spec->vars = d.vars;
  spec->seed = d.seed;
}

zt_status zt_gen_trace(const zt_gen_spec* spec, zt_trace** out) {
  ZT_REQUIRE(spec && spec->pattern && out, "null argument");
  return guarded([&] {
    GenSpec g;
    g.pattern = pattern_from_name(spec->pattern);
    g.iterations = spec->iterations;
    g.threads = spec->threads;
    g.locks = spec->locks;
    g.vars = spec->vars;
    g.seed = spec->seed;
    *out = new zt_trace{gen_trace(g)};
  });
}

zt_status zt_verify_trace(const zt_trace* trace, size_t run_threshold, const char* input_name, int* agree,
                          char** json_out, char** minimized) {
  ZT_REQUIRE(trace && agree && json_out, "null argument");
  return guarded([&] {
    auto v = verify_trace(trace->trace, run_threshold);
    *agree = v.agree ? 1 : 0;
    std::string j = verify_json(v, input_name ? input_name : "");
    std::string small;
    if (!v.agree && minimized) small = serialize_trace(minimize_disagreement(trace->trace, run_threshold));
    *json_out = dup_string(j);
    if (minimized) *minimized = v.agree ? nullptr : dup_string(small);
  });
}

zt_status zt_bench_trace(const zt_trace* trace, const zt_engine* engines, size_t n_engines, unsigned repeat,
                         size_t run_threshold, const char* input_name, char** json_lines) {
  ZT_REQUIRE(trace && json_lines && (engines || n_engines == 0), "null argument");
  for (size_t k = 0; k < n_engines; ++k) ZT_REQUIRE(valid_engine(engines[k]), "unknown engine code");
  return guarded([&] {
    std::vector<Engine> es;
    for (size_t k = 0; k < n_engines; ++k) es.push_back(to_engine(engines[k]));
    if (es.empty()) es = all_engines();
    std::string lines;
    for (const auto& row : bench_trace(trace->trace, es, repeat, run_threshold, input_name ? input_name : ""))
      lines += bench_json(row) + "\n";
    *json_lines = dup_string(lines);
  });
}

size_t zt_oracle_cap(void) { return oracle_cap(); }
void zt_set_oracle_cap(size_t cap) { set_oracle_cap(cap); }

}  // extern "C"
