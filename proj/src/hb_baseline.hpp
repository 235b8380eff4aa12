#pragma once

#include <optional>
#include <vector>

#include "hb_compressed.hpp"
#include "trace.hpp"

namespace ziptrace {

/// Conflicting, HB-unordered accesses; first < second.
struct RacePair {
  std::size_t first = 0;
  std::size_t second = 0;
  VarId var;
  bool operator==(const RacePair&) const = default;
};

/// Both detectors scan the whole trace and return the race found at the
/// earliest second event, paired with the latest conflicting access that
/// is unordered with it.
std::optional<RacePair> djit_detect(const Trace& trace);
std::optional<RacePair> goldilocks_detect(const Trace& trace);

/// Largest trace the brute-force oracles accept. ZIPTRACE_ORACLE_CAP
/// overrides the default of 2000 events.
std::size_t oracle_cap();
void set_oracle_cap(std::size_t cap);

/// Reflexive-transitive closure of the happens-before edges, built
/// directly from the edge definitions. Throws CapExceeded.
class HbClosure {
 public:
  explicit HbClosure(const Trace& trace);

  /// e_i ≤HB e_j, 1-based.
  bool ordered(std::size_t i, std::size_t j) const;
  std::size_t size() const { return n_; }

  std::vector<RacePair> races() const;
  bool has_race() const;

 private:
  const Trace* trace_;
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> pred_;  // row j: {i : e_i ≤HB e_j}
};

struct AfterBefore {
  SyncSet after;
  SyncSet before;
};

/// After/Before of event `index` within `trace` (which plays the chunk).
AfterBefore after_before_oracle(const Trace& trace, const HbClosure& hb, std::size_t index);
AfterBefore after_before_oracle(const Trace& trace, std::size_t index);

/// The summary of `trace` built straight from the definitions: race as
/// any unordered conflicting pair, every set from after_before_oracle at
/// the defining first/last witness event.
HbSummary brute_force_summary(const Trace& trace, const Universe& u);

}  // namespace ziptrace
