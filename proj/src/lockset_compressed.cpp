#include "lockset_compressed.hpp"

#include <algorithm>
#include <unordered_map>

namespace ziptrace {

namespace {

using Word = std::uint64_t;

void set_bit(Word* s, std::size_t i) { s[i / 64] |= Word{1} << (i % 64); }

}  // namespace

LockSetSummary::LockSetSummary(const LsUniverse& u)
    : u_(u),
      words_(u.words()),
      open_acq_(u.threads * u.locks, 0),
      open_rel_(u.threads * u.locks, 0),
      top_(u.threads * u.vars, true),
      sets_(u.threads * u.vars * u.words(), 0),
      violated_(u.vars, false) {}

LockSetValue LockSetSummary::lockset(ThreadId t, VarId x) const {
  if (top_[t.value * u_.vars + x.value]) return LockSetValue::universal();
  LsSet out;
  const Word* s = set(t.value, x.value);
  for (std::size_t i = 0; i < u_.bits(); ++i)
    if ((s[i / 64] >> (i % 64)) & 1u) out.insert(u_.lock(i));
  return LockSetValue::finite(std::move(out));
}

std::set<VarId> LockSetSummary::violated() const {
  std::set<VarId> out;
  for (std::size_t x = 0; x < u_.vars; ++x)
    if (violated_[x]) out.insert(VarId{static_cast<std::uint32_t>(x)});
  return out;
}

LockSetSummary ls_summarize_terminal(const EventLabel& label, const LsUniverse& u) {
  LockSetSummary s(u);
  const std::size_t t = label.thread.value;
  switch (label.op) {
    case OpKind::Acquire:
      s.open_acq_[t * u.locks + label.operand] = 1;
      break;
    case OpKind::Release:
      s.open_rel_[t * u.locks + label.operand] = 1;
      break;
    case OpKind::Read:
    case OpKind::Write: {
      const std::size_t x = label.operand;
      s.top_[t * u.vars + x] = false;
      Word* set = s.set(t, x);
      set_bit(set, u.index(LsLock::dummy(label.thread)));
      if (label.op == OpKind::Read) set_bit(set, u.index(LsLock::read_marker()));
      break;
    }
    default:
      break;
  }
  return s;
}

LockSetSummary ls_combine(const LockSetSummary& b, const LockSetSummary& c) {
  const LsUniverse& u = b.u_;
  if (!(u == c.u_)) throw UsageError("combining summaries over different universes");
  LockSetSummary a(u);
  const std::size_t T = u.threads, L = u.locks, V = u.vars, W = a.words_;

  // Locks a thread holds across the boundary: released in the right chunk
  // more often than acquired in the left (protect the left's accesses), or
  // acquired in the left more often than released in the right (protect
  // the right's).
  std::vector<Word> left_extra(W), right_extra(W);
  for (std::size_t t = 0; t < T; ++t) {
    std::fill(left_extra.begin(), left_extra.end(), 0);
    std::fill(right_extra.begin(), right_extra.end(), 0);
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t k = t * L + l;
      const std::uint64_t acq_b = b.open_acq_[k], rel_c = c.open_rel_[k];
      a.open_acq_[k] = c.open_acq_[k] + (acq_b > rel_c ? acq_b - rel_c : 0);
      a.open_rel_[k] = b.open_rel_[k] + (rel_c > acq_b ? rel_c - acq_b : 0);
      if (rel_c > acq_b) set_bit(left_extra.data(), l);
      if (acq_b > rel_c) set_bit(right_extra.data(), l);
    }
    for (std::size_t x = 0; x < V; ++x) {
      const std::size_t k = t * V + x;
      const bool top_b = b.top_[k], top_c = c.top_[k];
      if (top_b && top_c) continue;
      a.top_[k] = false;
      Word* out = a.set(t, x);
      const Word* sb = b.set(t, x);
      const Word* sc = c.set(t, x);
      for (std::size_t w = 0; w < W; ++w) {
        if (top_b)
          out[w] = sc[w] | right_extra[w];
        else if (top_c)
          out[w] = sb[w] | left_extra[w];
        else
          out[w] = (sb[w] | left_extra[w]) & (sc[w] | right_extra[w]);
      }
    }
  }
  for (std::size_t x = 0; x < V; ++x) a.violated_[x] = b.violated_[x] || c.violated_[x];
  return a;
}

void check_violations(LockSetSummary& s) {
  const LsUniverse& u = s.u_;
  const std::size_t W = s.words_;
  std::vector<Word> meet(W);
  for (std::size_t x = 0; x < u.vars; ++x) {
    if (s.violated_[x]) continue;
    std::fill(meet.begin(), meet.end(), ~Word{0});
    bool any = false;
    for (std::size_t t = 0; t < u.threads; ++t) {
      if (s.top_[t * u.vars + x]) continue;
      any = true;
      const Word* set = s.set(t, x);
      for (std::size_t w = 0; w < W; ++w) meet[w] &= set[w];
    }
    if (!any) continue;
    std::size_t pad = u.bits() % 64;
    if (pad) meet[W - 1] &= (Word{1} << pad) - 1;
    if (std::all_of(meet.begin(), meet.end(), [](Word w) { return w == 0; })) s.violated_[x] = true;
  }
}

LockSetSummary ls_fold(std::span<const EventLabel> labels, const LsUniverse& u) {
  if (labels.empty()) return LockSetSummary(u);
  LockSetSummary acc = ls_summarize_terminal(labels.front(), u);
  for (std::size_t i = 1; i < labels.size(); ++i) acc = ls_combine(acc, ls_summarize_terminal(labels[i], u));
  return acc;
}

LocksetResult analyze_slp_lockset(const Slp& slp, bool keep_summaries) {
  const LsUniverse u = LsUniverse::of(slp.symbols);
  const auto order = bottom_up_order(slp);
  std::unordered_map<std::uint32_t, LockSetSummary> memo;
  memo.reserve(order.size());
  std::unordered_map<EventLabel, LockSetSummary, EventLabelHash> terminals;
  auto summary_of = [&](const Symbol& sym) -> const LockSetSummary& {
    if (!sym.is_terminal()) return memo.at(sym.rule_id());
    auto it = terminals.find(sym.label());
    if (it == terminals.end()) it = terminals.emplace(sym.label(), ls_summarize_terminal(sym.label(), u)).first;
    return it->second;
  };

  for (auto id : order) {
    const RuleBody& body = slp.rules.at(id);
    LockSetSummary sum(u);
    if (!body.empty()) {
      sum = summary_of(body.front());
      for (std::size_t i = 1; i < body.size(); ++i) sum = ls_combine(sum, summary_of(body[i]));
    }
    check_violations(sum);
    memo.emplace(id, std::move(sum));
  }

  LocksetResult result;
  for (auto x : memo.at(slp.start).violated()) result.violations.push_back(x);
  if (keep_summaries)
    for (auto& [id, sum] : memo) result.summaries.emplace(id, std::move(sum));
  return result;
}

}  // namespace ziptrace
