#pragma once

#include <map>
#include <set>
#include <vector>

#include "trace.hpp"

namespace ziptrace {

/// A program lock, the read marker Λ, or the per-thread dummy lock ℓ_t.
struct LsLock {
  enum class Kind : std::uint8_t { Real, ReadMarker, ThreadDummy };
  Kind kind = Kind::Real;
  std::uint32_t id = 0;

  static LsLock real(LockId l) { return {Kind::Real, l.value}; }
  static LsLock read_marker() { return {Kind::ReadMarker, 0}; }
  static LsLock dummy(ThreadId t) { return {Kind::ThreadDummy, t.value}; }

  auto operator<=>(const LsLock&) const = default;
};

using LsSet = std::set<LsLock>;

std::string format_lslock(const Symbols& symbols, LsLock l);

/// Bit layout of lockset bitsets: program locks, then Λ, then one dummy
/// per thread.
struct LsUniverse {
  std::size_t threads = 0;
  std::size_t locks = 0;
  std::size_t vars = 0;

  static LsUniverse of(const Symbols& s) { return {s.threads.size(), s.locks.size(), s.vars.size()}; }
  std::size_t bits() const { return locks + 1 + threads; }
  std::size_t words() const { return (bits() + 63) / 64; }
  std::size_t index(LsLock l) const {
    switch (l.kind) {
      case LsLock::Kind::Real:
        return l.id;
      case LsLock::Kind::ReadMarker:
        return locks;
      case LsLock::Kind::ThreadDummy:
        return locks + 1 + l.id;
    }
    return 0;
  }
  LsLock lock(std::size_t i) const {
    if (i < locks) return {LsLock::Kind::Real, static_cast<std::uint32_t>(i)};
    if (i == locks) return LsLock::read_marker();
    return {LsLock::Kind::ThreadDummy, static_cast<std::uint32_t>(i - locks - 1)};
  }
  bool operator==(const LsUniverse&) const = default;
};

struct EraserResult {
  std::vector<VarId> violations;             // ascending id
  std::map<VarId, std::size_t> first_empty;  // informational, 1-based
  std::map<std::pair<ThreadId, VarId>, LsSet> locksets;  // accessed pairs only
};

/// Lockset discipline check with reentrant locks and dummy locks. Locks
/// released without a matching acquire count as held by every earlier
/// access of that thread, so a first pass locates those releases.
EraserResult eraser_detect(const Trace& trace);

/// LocksHeld(e) straight from the definition. Throws CapExceeded and
/// UsageError (not an access).
std::set<LockId> locksheld_oracle(const Trace& trace, std::size_t index);

/// Intersections over locksheld_oracle for every accessed (t, x) and the
/// resulting violated variables.
struct LocksetOracle {
  std::map<std::pair<ThreadId, VarId>, LsSet> locksets;
  std::set<VarId> violations;
};
LocksetOracle lockset_oracle(const Trace& trace);

}  // namespace ziptrace
