#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hb_baseline.hpp"
#include "slp.hpp"
#include "trace.hpp"

namespace ziptrace {

enum class Engine { HbCompressed, HbVc, HbGoldilocks, LsCompressed, LsEraser };

Engine engine_from_name(const std::string& name);  // throws UsageError
std::string engine_name(Engine e);
bool engine_is_compressed(Engine e);
bool engine_is_hb(Engine e);
const std::vector<Engine>& all_engines();

struct ReportStats {
  std::uint64_t events = 0;
  std::size_t threads = 0;
  std::size_t locks = 0;
  std::size_t vars = 0;
  std::optional<std::size_t> grammar_size;  // grammar inputs only
  std::optional<double> compression_ratio;
  double wall_ms = 0;
};

struct Report {
  Engine engine = Engine::HbVc;
  std::string input;
  bool found = false;
  std::optional<RacePair> first_race;            // hb baselines
  std::vector<std::string> violations;           // lockset engines, by name
  std::vector<std::pair<std::string, std::size_t>> first_empty;  // eraser
  ReportStats stats;
};

/// Runs a baseline engine on a trace, or a compressed engine on a grammar.
/// wall_ms covers the analysis only. Throws UsageError on a mismatch.
Report run_on_trace(Engine e, const Trace& trace, const std::string& input);
Report run_on_slp(Engine e, const Slp& slp, const std::string& input);

std::string report_json(const Report& r, const Symbols& symbols);

constexpr std::size_t kDefaultRunThreshold = 8;

/// Every engine (compressed ones on the plain and the normalized grammar)
/// and, under the oracle cap, the brute-force oracles.
struct VerifyOutcome {
  bool agree = true;
  bool oracle_used = false;
  std::vector<std::pair<std::string, bool>> race_answers;
  std::vector<std::pair<std::string, std::vector<std::string>>> violation_answers;
  std::string note;  // first disagreement, human readable
};

VerifyOutcome verify_trace(const Trace& trace, std::size_t run_threshold = kDefaultRunThreshold);

/// Greedy event deletion keeping the trace free of validation errors and
/// still disagreeing.
Trace minimize_disagreement(const Trace& trace, std::size_t run_threshold = kDefaultRunThreshold);

std::string verify_json(const VerifyOutcome& v, const std::string& input);

struct BenchRow {
  Engine engine = Engine::HbVc;
  std::string input;
  std::uint64_t events = 0;
  std::size_t grammar_size = 0;
  double compression_ratio = 0;
  double median_ms = 0;
  std::optional<double> compress_ms;  // compressed engines
  std::optional<double> speedup;      // compressed engines with a baseline in the run
};

std::vector<BenchRow> bench_trace(const Trace& trace, const std::vector<Engine>& engines, unsigned repeat,
                                  std::size_t run_threshold, const std::string& input);

std::string bench_json(const BenchRow& row);

}  // namespace ziptrace
