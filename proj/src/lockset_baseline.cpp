#include "lockset_baseline.hpp"

#include <algorithm>

#include "hb_baseline.hpp"

namespace ziptrace {

namespace {

using Word = std::uint64_t;

void set_bit(Word* s, std::size_t i) { s[i / 64] |= Word{1} << (i % 64); }
void clear_bit(Word* s, std::size_t i) { s[i / 64] &= ~(Word{1} << (i % 64)); }

LsSet decode(const Word* s, const LsUniverse& u) {
  LsSet out;
  for (std::size_t i = 0; i < u.bits(); ++i)
    if ((s[i / 64] >> (i % 64)) & 1u) out.insert(u.lock(i));
  return out;
}

}  // namespace

std::string format_lslock(const Symbols& symbols, LsLock l) {
  switch (l.kind) {
    case LsLock::Kind::Real:
      return symbols.locks.name(l.id);
    case LsLock::Kind::ReadMarker:
      return "<read>";
    case LsLock::Kind::ThreadDummy:
      return "<thread:" + symbols.threads.name(l.id) + ">";
  }
  return "?";
}

EraserResult eraser_detect(const Trace& trace) {
  const LsUniverse u = LsUniverse::of(trace.symbols());
  const std::size_t T = u.threads, L = u.locks, V = u.vars, W = std::max<std::size_t>(1, u.words());

  // Pass 1: last release of each (t, l) that finds no open acquire.
  std::vector<std::size_t> depth(T * L, 0), last_unmatched(T * L, 0);
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    if (!l.is_lock_op()) continue;
    auto k = l.thread.value * L + l.operand;
    if (l.op == OpKind::Acquire)
      ++depth[k];
    else if (depth[k] > 0)
      --depth[k];
    else
      last_unmatched[k] = i;
  }

  // Pass 2: held = open acquires | locks still to be released unmatched.
  std::fill(depth.begin(), depth.end(), 0);
  std::vector<Word> held(T * W, 0);
  std::vector<Word> pending(T * W, 0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t l = 0; l < L; ++l)
      if (last_unmatched[t * L + l]) set_bit(&pending[t * W], l);

  std::vector<Word> ls(T * V * W, 0);
  std::vector<bool> accessed(T * V, false), flagged(V, false);
  std::vector<Word> meet(W), here(W);
  EraserResult result;

  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    const std::size_t t = l.thread.value;
    if (l.is_lock_op()) {
      auto k = t * L + l.operand;
      if (l.op == OpKind::Acquire) {
        if (depth[k]++ == 0) set_bit(&held[t * W], l.operand);
      } else {
        if (depth[k] > 0 && --depth[k] == 0) clear_bit(&held[t * W], l.operand);
        if (last_unmatched[k] == i) clear_bit(&pending[t * W], l.operand);
      }
      continue;
    }
    if (!l.is_access()) continue;

    const std::size_t x = l.operand;
    Word* cur = &ls[(t * V + x) * W];
    for (std::size_t w = 0; w < W; ++w) here[w] = held[t * W + w] | pending[t * W + w];
    set_bit(here.data(), u.index(LsLock::dummy(l.thread)));
    if (l.op == OpKind::Read) set_bit(here.data(), u.index(LsLock::read_marker()));
    if (!accessed[t * V + x]) {
      accessed[t * V + x] = true;
      std::copy(here.begin(), here.end(), cur);
    } else {
      for (std::size_t w = 0; w < W; ++w) cur[w] &= here[w];
    }

    if (flagged[x]) continue;
    std::fill(meet.begin(), meet.end(), ~Word{0});
    for (std::size_t o = 0; o < T; ++o) {
      if (!accessed[o * V + x]) continue;
      for (std::size_t w = 0; w < W; ++w) meet[w] &= ls[(o * V + x) * W + w];
    }
    // clear padding bits so they don't keep the meet non-empty
    std::size_t pad = u.bits() % 64;
    if (pad) meet[W - 1] &= (Word{1} << pad) - 1;
    if (std::all_of(meet.begin(), meet.end(), [](Word w) { return w == 0; })) {
      flagged[x] = true;
      result.first_empty[VarId{static_cast<std::uint32_t>(x)}] = i;
    }
  }

  for (std::size_t x = 0; x < V; ++x)
    if (flagged[x]) result.violations.push_back(VarId{static_cast<std::uint32_t>(x)});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t x = 0; x < V; ++x)
      if (accessed[t * V + x])
        result.locksets[{ThreadId{static_cast<std::uint32_t>(t)}, VarId{static_cast<std::uint32_t>(x)}}] =
            decode(&ls[(t * V + x) * W], u);
  return result;
}

std::set<LockId> locksheld_oracle(const Trace& trace, std::size_t index) {
  if (trace.size() > oracle_cap())
    throw CapExceeded("trace has " + std::to_string(trace.size()) + " events; oracle cap is " +
                      std::to_string(oracle_cap()));
  const Event e = trace.event(index);
  if (!e.label.is_access()) throw UsageError("event " + std::to_string(index) + " is not a read or write");
  const auto match = match_table(trace);
  std::set<LockId> out;
  for (std::size_t k = 1; k <= trace.size(); ++k) {
    const auto& l = trace.label(k);
    if (l.thread != e.label.thread || !l.is_lock_op()) continue;
    if (l.op == OpKind::Acquire && k < index && !(match[k] && *match[k] < index)) out.insert(l.lock());
    if (l.op == OpKind::Release && k > index && !(match[k] && *match[k] > index)) out.insert(l.lock());
  }
  return out;
}

LocksetOracle lockset_oracle(const Trace& trace) {
  LocksetOracle out;
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    if (!l.is_access()) continue;
    LsSet here;
    for (auto lock : locksheld_oracle(trace, i)) here.insert(LsLock::real(lock));
    here.insert(LsLock::dummy(l.thread));
    if (l.op == OpKind::Read) here.insert(LsLock::read_marker());
    auto key = std::make_pair(l.thread, l.var());
    auto it = out.locksets.find(key);
    if (it == out.locksets.end()) {
      out.locksets.emplace(key, std::move(here));
    } else {
      LsSet meet;
      std::set_intersection(it->second.begin(), it->second.end(), here.begin(), here.end(),
                            std::inserter(meet, meet.begin()));
      it->second = std::move(meet);
    }
  }
  std::map<VarId, std::vector<const LsSet*>> by_var;
  for (const auto& [key, set] : out.locksets) by_var[key.second].push_back(&set);
  for (const auto& [x, sets] : by_var) {
    LsSet meet = *sets.front();
    for (std::size_t k = 1; k < sets.size(); ++k) {
      LsSet next;
      std::set_intersection(meet.begin(), meet.end(), sets[k]->begin(), sets[k]->end(),
                            std::inserter(next, next.begin()));
      meet = std::move(next);
    }
    if (meet.empty()) out.violations.insert(x);
  }
  return out;
}

}  // namespace ziptrace
