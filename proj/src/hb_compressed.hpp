#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "slp.hpp"

namespace ziptrace {

/// A thread or a lock: the things After/Before sets are made of.
struct SyncObject {
  enum class Kind : std::uint8_t { Thread, Lock };
  Kind kind = Kind::Thread;
  std::uint32_t id = 0;

  static SyncObject thread(ThreadId t) { return {Kind::Thread, t.value}; }
  static SyncObject lock(LockId l) { return {Kind::Lock, l.value}; }

  auto operator<=>(const SyncObject&) const = default;
};

using SyncSet = std::set<SyncObject>;

std::string format_sync(const Symbols& symbols, SyncObject u);

/// Sizes of the id spaces a summary is indexed by.
struct Universe {
  std::size_t threads = 0;
  std::size_t locks = 0;
  std::size_t vars = 0;

  static Universe of(const Symbols& s) { return {s.threads.size(), s.locks.size(), s.vars.size()}; }
  std::size_t sync() const { return threads + locks; }
  std::size_t index(SyncObject u) const { return u.kind == SyncObject::Kind::Thread ? u.id : threads + u.id; }
  SyncObject object(std::size_t i) const {
    return i < threads ? SyncObject{SyncObject::Kind::Thread, static_cast<std::uint32_t>(i)}
                       : SyncObject{SyncObject::Kind::Lock, static_cast<std::uint32_t>(i - threads)};
  }
  bool operator==(const Universe&) const = default;
};

/// Per-chunk happens-before bookkeeping. Every set is a bitset over
/// threads followed by locks; an empty set means the key is absent.
///
///   af(u)    After of the first event of u (thread: own event or join of u;
///            lock: acquire)
///   bl(u)    Before of the last event of u (thread: own event or fork of u;
///            lock: release)
///   ar/aw    After of the last read by t of x / last write of x
///   br/bw    Before of the first read by t of x / first write of x
class HbSummary {
 public:
  HbSummary() = default;
  explicit HbSummary(const Universe& u);

  bool race = false;

  const Universe& universe() const { return u_; }

  SyncSet af(SyncObject u) const { return decode(slot_af(u_.index(u))); }
  SyncSet bl(SyncObject u) const { return decode(slot_bl(u_.index(u))); }
  SyncSet ar(ThreadId t, VarId x) const { return decode(slot_ar(t.value, x.value)); }
  SyncSet br(ThreadId t, VarId x) const { return decode(slot_br(t.value, x.value)); }
  SyncSet aw(VarId x) const { return decode(slot_aw(x.value)); }
  SyncSet bw(VarId x) const { return decode(slot_bw(x.value)); }

  bool operator==(const HbSummary& other) const;

  // Raw slot access for the combining code.
  std::size_t words() const { return words_; }
  std::uint64_t* slot(std::size_t s) { return data_.data() + s * words_; }
  const std::uint64_t* slot(std::size_t s) const { return data_.data() + s * words_; }
  std::size_t af_slot(std::size_t i) const { return i; }
  std::size_t bl_slot(std::size_t i) const { return u_.sync() + i; }
  std::size_t ar_slot(std::size_t t, std::size_t x) const { return 2 * u_.sync() + t * u_.vars + x; }
  std::size_t br_slot(std::size_t t, std::size_t x) const {
    return 2 * u_.sync() + u_.threads * u_.vars + t * u_.vars + x;
  }
  std::size_t aw_slot(std::size_t x) const { return 2 * u_.sync() + 2 * u_.threads * u_.vars + x; }
  std::size_t bw_slot(std::size_t x) const { return 2 * u_.sync() + 2 * u_.threads * u_.vars + u_.vars + x; }

 private:
  const std::uint64_t* slot_af(std::size_t i) const { return slot(af_slot(i)); }
  const std::uint64_t* slot_bl(std::size_t i) const { return slot(bl_slot(i)); }
  const std::uint64_t* slot_ar(std::size_t t, std::size_t x) const { return slot(ar_slot(t, x)); }
  const std::uint64_t* slot_br(std::size_t t, std::size_t x) const { return slot(br_slot(t, x)); }
  const std::uint64_t* slot_aw(std::size_t x) const { return slot(aw_slot(x)); }
  const std::uint64_t* slot_bw(std::size_t x) const { return slot(bw_slot(x)); }
  SyncSet decode(const std::uint64_t* s) const;

  Universe u_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
};

HbSummary summarize_terminal(const EventLabel& label, const Universe& u);

/// Summary of the concatenation of adjacent chunks `left` then `right`.
HbSummary combine(const HbSummary& left, const HbSummary& right);

/// Left fold of summarize_terminal/combine over a label run.
HbSummary fold_summary(std::span<const EventLabel> labels, const Universe& u);

/// Same value as fold_summary, computed in one vector-clock pass.
HbSummary vc_shortcut_summary(std::span<const EventLabel> labels, const Universe& u);

struct HbOptions {
  bool vc_shortcut = true;      // all-terminal rules use vc_shortcut_summary
  bool keep_summaries = false;  // return every rule's summary
};

struct HbResult {
  bool race_found = false;
  std::map<std::uint32_t, HbSummary> summaries;
};

/// One summary per rule, bottom-up; arity-k rules are left-folded.
HbResult analyze_slp_hb(const Slp& slp, const HbOptions& options = {});

}  // namespace ziptrace
