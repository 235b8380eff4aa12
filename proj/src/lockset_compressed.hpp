#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "lockset_baseline.hpp"
#include "slp.hpp"

namespace ziptrace {

/// ⊤ (the pair is unaccessed in the chunk) or a finite lockset.
struct LockSetValue {
  bool top = true;
  LsSet locks;

  static LockSetValue universal() { return {}; }
  static LockSetValue finite(LsSet s) { return {false, std::move(s)}; }
  bool operator==(const LockSetValue&) const = default;
};

/// Per-chunk lockset bookkeeping: unmatched acquire/release counts, the
/// lockset of every (thread, variable) pair and the variables already
/// found violated in this chunk or below it.
class LockSetSummary {
 public:
  LockSetSummary() = default;
  explicit LockSetSummary(const LsUniverse& u);

  const LsUniverse& universe() const { return u_; }

  std::uint64_t open_acq(ThreadId t, LockId l) const { return open_acq_[t.value * u_.locks + l.value]; }
  std::uint64_t open_rel(ThreadId t, LockId l) const { return open_rel_[t.value * u_.locks + l.value]; }
  LockSetValue lockset(ThreadId t, VarId x) const;
  std::set<VarId> violated() const;

  bool operator==(const LockSetSummary&) const = default;

 private:
  friend LockSetSummary ls_summarize_terminal(const EventLabel&, const LsUniverse&);
  friend LockSetSummary ls_combine(const LockSetSummary&, const LockSetSummary&);
  friend void check_violations(LockSetSummary&);

  std::uint64_t* set(std::size_t t, std::size_t x) { return sets_.data() + (t * u_.vars + x) * words_; }
  const std::uint64_t* set(std::size_t t, std::size_t x) const {
    return sets_.data() + (t * u_.vars + x) * words_;
  }

  LsUniverse u_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> open_acq_, open_rel_;  // T x L
  std::vector<bool> top_;                           // T x V
  std::vector<std::uint64_t> sets_;                 // T x V x words
  std::vector<bool> violated_;                      // V
};

LockSetSummary ls_summarize_terminal(const EventLabel& label, const LsUniverse& u);

/// Summary of `left` followed by `right`. Violations are inherited, not
/// re-checked; see check_violations.
LockSetSummary ls_combine(const LockSetSummary& left, const LockSetSummary& right);

/// Marks every variable whose non-⊤ locksets have an empty intersection.
void check_violations(LockSetSummary& s);

LockSetSummary ls_fold(std::span<const EventLabel> labels, const LsUniverse& u);

struct LocksetResult {
  std::vector<VarId> violations;  // ascending id
  std::map<std::uint32_t, LockSetSummary> summaries;
};

/// Bottom-up over the rules; each rule's summary is checked once complete.
LocksetResult analyze_slp_lockset(const Slp& slp, bool keep_summaries = false);

}  // namespace ziptrace
