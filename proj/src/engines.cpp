#include "engines.hpp"

#include <algorithm>
#include <chrono>
#include <json.hpp>

#include "hb_compressed.hpp"
#include "lockset_baseline.hpp"
#include "lockset_compressed.hpp"
#include "sequitur.hpp"

namespace ziptrace {

using json = nlohmann::ordered_json;

namespace {

struct EngineName {
  Engine engine;
  const char* name;
};

constexpr EngineName kEngines[] = {
    {Engine::HbCompressed, "hb-compressed"}, {Engine::HbVc, "hb-vc"},         {Engine::HbGoldilocks, "hb-goldilocks"},
    {Engine::LsCompressed, "ls-compressed"}, {Engine::LsEraser, "ls-eraser"},
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::vector<std::string> var_names(const Symbols& s, const std::vector<VarId>& xs) {
  std::vector<std::string> out;
  for (auto x : xs) out.push_back(s.name(x));
  std::sort(out.begin(), out.end());
  return out;
}

ReportStats stats_for(const Symbols& s, std::uint64_t events) {
  ReportStats st;
  st.events = events;
  st.threads = s.threads.size();
  st.locks = s.locks.size();
  st.vars = s.vars.size();
  return st;
}

}  // namespace

Engine engine_from_name(const std::string& name) {
  for (const auto& e : kEngines)
    if (name == e.name) return e.engine;
  throw UsageError("unknown engine '" + name +
                   "' (expected hb-compressed, hb-vc, hb-goldilocks, ls-compressed or ls-eraser)");
}

std::string engine_name(Engine e) {
  for (const auto& k : kEngines)
    if (k.engine == e) return k.name;
  return "?";
}

bool engine_is_compressed(Engine e) { return e == Engine::HbCompressed || e == Engine::LsCompressed; }
bool engine_is_hb(Engine e) { return e == Engine::HbCompressed || e == Engine::HbVc || e == Engine::HbGoldilocks; }

const std::vector<Engine>& all_engines() {
  static const std::vector<Engine> all{Engine::HbCompressed, Engine::HbVc, Engine::HbGoldilocks, Engine::LsCompressed,
                                       Engine::LsEraser};
  return all;
}

Report run_on_trace(Engine e, const Trace& trace, const std::string& input) {
  if (engine_is_compressed(e)) throw UsageError(engine_name(e) + " needs a grammar input");
  Report r;
  r.engine = e;
  r.input = input;
  r.stats = stats_for(trace.symbols(), trace.size());
  auto start = std::chrono::steady_clock::now();
  switch (e) {
    case Engine::HbVc:
      r.first_race = djit_detect(trace);
      r.found = r.first_race.has_value();
      break;
    case Engine::HbGoldilocks:
      r.first_race = goldilocks_detect(trace);
      r.found = r.first_race.has_value();
      break;
    case Engine::LsEraser: {
      auto res = eraser_detect(trace);
      r.stats.wall_ms = elapsed_ms(start);
      r.violations = var_names(trace.symbols(), res.violations);
      r.found = !res.violations.empty();
      for (const auto& [x, at] : res.first_empty) r.first_empty.emplace_back(trace.symbols().name(x), at);
      return r;
    }
    default:
      break;
  }
  r.stats.wall_ms = elapsed_ms(start);
  return r;
}

Report run_on_slp(Engine e, const Slp& slp, const std::string& input) {
  if (!engine_is_compressed(e)) throw UsageError(engine_name(e) + " needs a trace input");
  Report r;
  r.engine = e;
  r.input = input;
  auto g = grammar_stats(slp);
  r.stats = stats_for(slp.symbols, g.expanded_length);
  r.stats.grammar_size = g.size;
  r.stats.compression_ratio = g.compression_ratio;
  auto start = std::chrono::steady_clock::now();
  if (e == Engine::HbCompressed) {
    r.found = analyze_slp_hb(slp).race_found;
    r.stats.wall_ms = elapsed_ms(start);
  } else {
    auto res = analyze_slp_lockset(slp);
    r.stats.wall_ms = elapsed_ms(start);
    r.violations = var_names(slp.symbols, res.violations);
    r.found = !res.violations.empty();
  }
  return r;
}

std::string report_json(const Report& r, const Symbols& symbols) {
  json j;
  j["v"] = 1;
  j["engine"] = engine_name(r.engine);
  j["input"] = r.input;
  if (engine_is_hb(r.engine)) {
    j["race_found"] = r.found;
    if (!engine_is_compressed(r.engine)) {
      if (r.first_race)
        j["first_race"] = {{"first", r.first_race->first},
                           {"second", r.first_race->second},
                           {"var", symbols.name(r.first_race->var)}};
      else
        j["first_race"] = nullptr;
    }
  } else {
    j["violations"] = r.violations;
    if (r.engine == Engine::LsEraser) {
      json fe = json::object();
      for (const auto& [x, at] : r.first_empty) fe[x] = at;
      j["first_empty"] = fe;
    }
  }
  json st;
  st["events"] = r.stats.events;
  st["threads"] = r.stats.threads;
  st["locks"] = r.stats.locks;
  st["vars"] = r.stats.vars;
  st["grammar_size"] = r.stats.grammar_size ? json(*r.stats.grammar_size) : json(nullptr);
  st["compression_ratio"] = r.stats.compression_ratio ? json(*r.stats.compression_ratio) : json(nullptr);
  st["wall_ms"] = r.stats.wall_ms;
  j["stats"] = st;
  return j.dump();
}

VerifyOutcome verify_trace(const Trace& trace, std::size_t run_threshold) {
  VerifyOutcome out;
  const Slp plain = sequitur_compress(trace);
  const Slp normalized = normalize(plain, run_threshold);
  const auto& sym = trace.symbols();

  out.race_answers.emplace_back("hb-compressed", analyze_slp_hb(plain).race_found);
  out.race_answers.emplace_back("hb-compressed/normalized", analyze_slp_hb(normalized).race_found);
  out.race_answers.emplace_back("hb-compressed/fold", analyze_slp_hb(plain, {.vc_shortcut = false}).race_found);
  auto vc = djit_detect(trace);
  auto gl = goldilocks_detect(trace);
  out.race_answers.emplace_back("hb-vc", vc.has_value());
  out.race_answers.emplace_back("hb-goldilocks", gl.has_value());

  out.violation_answers.emplace_back("ls-compressed", var_names(sym, analyze_slp_lockset(plain).violations));
  out.violation_answers.emplace_back("ls-compressed/normalized",
                                     var_names(sym, analyze_slp_lockset(normalized).violations));
  out.violation_answers.emplace_back("ls-eraser", var_names(sym, eraser_detect(trace).violations));

  if (trace.size() <= oracle_cap()) {
    out.oracle_used = true;
    HbClosure hb(trace);
    out.race_answers.emplace_back("oracle", hb.has_race());
    auto ls = lockset_oracle(trace);
    out.violation_answers.emplace_back("oracle",
                                       var_names(sym, std::vector<VarId>(ls.violations.begin(), ls.violations.end())));
  }

  for (const auto& [name, answer] : out.race_answers)
    if (answer != out.race_answers.front().second) {
      out.agree = false;
      out.note = "race existence: " + name + " says " + (answer ? "race" : "no race") + ", " +
                 out.race_answers.front().first + " says " + (out.race_answers.front().second ? "race" : "no race");
      return out;
    }
  for (const auto& [name, answer] : out.violation_answers)
    if (answer != out.violation_answers.front().second) {
      out.agree = false;
      out.note = "violated variables: " + name + " disagrees with " + out.violation_answers.front().first;
      return out;
    }
  if (vc != gl) {
    out.agree = false;
    out.note = "hb-vc and hb-goldilocks report different first races";
  }
  return out;
}

Trace minimize_disagreement(const Trace& trace, std::size_t run_threshold) {
  std::vector<EventLabel> cur(trace.labels().begin(), trace.labels().end());
  auto disagrees = [&](const std::vector<EventLabel>& labels) {
    Trace t(trace.symbols(), labels);
    if (has_errors(validate(t))) return false;
    return !verify_trace(t, run_threshold).agree;
  };
  if (!disagrees(cur)) return trace;
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (std::size_t i = cur.size(); i-- > 0;) {
      auto candidate = cur;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
      if (disagrees(candidate)) {
        cur = std::move(candidate);
        shrunk = true;
      }
    }
  }
  return Trace(trace.symbols(), std::move(cur));
}

std::string verify_json(const VerifyOutcome& v, const std::string& input) {
  json j;
  j["v"] = 1;
  j["input"] = input;
  j["agree"] = v.agree;
  j["oracle_used"] = v.oracle_used;
  json races = json::object();
  for (const auto& [name, answer] : v.race_answers) races[name] = answer;
  j["race_found"] = races;
  json viol = json::object();
  for (const auto& [name, answer] : v.violation_answers) viol[name] = answer;
  j["violations"] = viol;
  if (!v.agree) j["disagreement"] = v.note;
  return j.dump();
}

std::vector<BenchRow> bench_trace(const Trace& trace, const std::vector<Engine>& engines, unsigned repeat,
                                  std::size_t run_threshold, const std::string& input) {
  if (repeat == 0) throw UsageError("repeat must be at least 1");
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
  };

  bool need_grammar = std::any_of(engines.begin(), engines.end(), engine_is_compressed);
  Slp grammar;
  double compress_ms = 0;
  GrammarStats g;
  if (need_grammar) {
    std::vector<double> times;
    for (unsigned k = 0; k < repeat; ++k) {
      auto start = std::chrono::steady_clock::now();
      grammar = normalize(sequitur_compress(trace), run_threshold);
      times.push_back(elapsed_ms(start));
    }
    compress_ms = median(times);
    g = grammar_stats(grammar);
  }

  std::vector<BenchRow> rows;
  for (auto e : engines) {
    BenchRow row;
    row.engine = e;
    row.input = input;
    row.events = trace.size();
    row.grammar_size = g.size;
    row.compression_ratio = g.compression_ratio;
    std::vector<double> times;
    for (unsigned k = 0; k < repeat; ++k) {
      Report r = engine_is_compressed(e) ? run_on_slp(e, grammar, input) : run_on_trace(e, trace, input);
      times.push_back(r.stats.wall_ms);
    }
    row.median_ms = median(times);
    if (engine_is_compressed(e)) row.compress_ms = compress_ms;
    rows.push_back(row);
  }

  for (auto& row : rows) {
    if (!engine_is_compressed(row.engine)) continue;
    std::optional<double> best;
    for (const auto& other : rows) {
      if (engine_is_compressed(other.engine) || engine_is_hb(other.engine) != engine_is_hb(row.engine)) continue;
      if (!best || other.median_ms < *best) best = other.median_ms;
    }
    if (best && row.median_ms > 0) row.speedup = *best / row.median_ms;
  }
  return rows;
}

std::string bench_json(const BenchRow& row) {
  json j;
  j["v"] = 1;
  j["engine"] = engine_name(row.engine);
  j["input"] = row.input;
  j["events"] = row.events;
  j["grammar_size"] = row.grammar_size;
  j["compression_ratio"] = row.compression_ratio;
  j["median_ms"] = row.median_ms;
  j["compress_ms"] = row.compress_ms ? json(*row.compress_ms) : json(nullptr);
  j["speedup"] = row.speedup ? json(*row.speedup) : json(nullptr);
  return j.dump();
}

}  // namespace ziptrace
