#pragma once

#include <initializer_list>
#include <string>

#include "hb_compressed.hpp"
#include "lockset_baseline.hpp"
#include "generator.hpp"
#include "slp.hpp"
#include "trace.hpp"

namespace zt_test {

using namespace ziptrace;

inline std::string fixture(const std::string& name) { return std::string(ZT_FIXTURES) + "/" + name; }

inline Trace sigma1() { return load_trace(fixture("sigma1.trace")); }
inline Trace sigma2() { return load_trace(fixture("sigma2.trace")); }
inline Slp sigma1_slp() { return load_slp(fixture("sigma1.slp")); }
inline Slp sigma2_slp() { return load_slp(fixture("sigma2.slp")); }

inline ThreadId th(const Symbols& s, const std::string& n) { return ThreadId{s.threads.find(n).value()}; }
inline LockId lk(const Symbols& s, const std::string& n) { return LockId{s.locks.find(n).value()}; }
inline VarId var(const Symbols& s, const std::string& n) { return VarId{s.vars.find(n).value()}; }

inline SyncSet sync_set(const Symbols& s, std::initializer_list<const char*> threads,
                        std::initializer_list<const char*> locks) {
  SyncSet out;
  for (auto t : threads) out.insert(SyncObject::thread(th(s, t)));
  for (auto l : locks) out.insert(SyncObject::lock(lk(s, l)));
  return out;
}

inline GenSpec random_spec(std::uint64_t events, std::uint64_t threads, std::uint64_t locks, std::uint64_t vars,
                           std::uint64_t seed) {
  return {Pattern::Random, events, static_cast<std::uint32_t>(threads), static_cast<std::uint32_t>(locks),
          static_cast<std::uint32_t>(vars), seed};
}

/// The sub-trace a rule derives, against the grammar's own symbol tables.
inline Trace chunk(const Slp& slp, std::uint32_t rule) {
  Slp g = slp;
  g.start = rule;
  return expand(g);
}

}  // namespace zt_test
