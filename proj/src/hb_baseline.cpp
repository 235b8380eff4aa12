#include "hb_baseline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace ziptrace {

namespace {

using Word = std::uint64_t;

bool conflicting(const EventLabel& a, const EventLabel& b) {
  return a.is_access() && b.is_access() && a.operand == b.operand && a.thread != b.thread &&
         (a.op == OpKind::Write || b.op == OpKind::Write);
}

std::atomic<std::size_t> g_cap{0};  // 0: not yet resolved

}  // namespace

std::size_t oracle_cap() {
  std::size_t cap = g_cap.load();
  if (cap != 0) return cap;
  cap = 2000;
  if (const char* env = std::getenv("ZIPTRACE_ORACLE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<std::size_t>(v);
  }
  g_cap.store(cap);
  return cap;
}

void set_oracle_cap(std::size_t cap) { g_cap.store(cap); }

std::optional<RacePair> djit_detect(const Trace& trace) {
  const std::size_t T = trace.symbols().threads.size();
  const std::size_t L = trace.symbols().locks.size();
  const std::size_t V = trace.symbols().vars.size();
  using Clock = std::uint32_t;
  std::vector<Clock> vc(T * T, 0), lock_vc(L * T, 0);
  // last access of x by thread o: epoch and trace index
  std::vector<Clock> read_epoch(T * V, 0), write_epoch(T * V, 0);
  std::vector<std::size_t> read_at(T * V, 0), write_at(T * V, 0);

  std::optional<RacePair> found;
  auto join_into = [&](Clock* d, const Clock* s) {
    for (std::size_t i = 0; i < T; ++i) d[i] = std::max(d[i], s[i]);
  };

  const auto labels = trace.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto& l = labels[j];
    const std::size_t t = l.thread.value;
    Clock* ct = &vc[t * T];
    switch (l.op) {
      case OpKind::Acquire:
        join_into(ct, &lock_vc[l.operand * T]);
        break;
      case OpKind::Join:
        join_into(ct, &vc[l.operand * T]);
        break;
      default:
        break;
    }
    ++ct[t];
    const std::size_t index = j + 1;

    if (l.is_access()) {
      const std::size_t x = l.operand;
      std::size_t partner = 0;
      for (std::size_t o = 0; o < T; ++o) {
        if (o == t) continue;
        if (write_epoch[o * V + x] > ct[o]) partner = std::max(partner, write_at[o * V + x]);
        if (l.op == OpKind::Write && read_epoch[o * V + x] > ct[o]) partner = std::max(partner, read_at[o * V + x]);
      }
      if (partner != 0 && !found) found = RacePair{partner, index, l.var()};
      auto& epoch = (l.op == OpKind::Read ? read_epoch : write_epoch)[t * V + x];
      auto& at = (l.op == OpKind::Read ? read_at : write_at)[t * V + x];
      epoch = ct[t];
      at = index;
    } else if (l.op == OpKind::Release) {
      join_into(&lock_vc[l.operand * T], ct);
    } else if (l.op == OpKind::Fork) {
      join_into(&vc[l.operand * T], ct);
    }
  }
  return found;
}

std::optional<RacePair> goldilocks_detect(const Trace& trace) {
  const Universe u = Universe::of(trace.symbols());
  const std::size_t T = u.threads, V = u.vars;
  const std::size_t w = std::max<std::size_t>(1, (u.sync() + 63) / 64);
  // Slots 0..V-1: GLS_w(x); then GLS_r(t,x) at V + t*V + x.
  const std::size_t n_sets = V + T * V;
  std::vector<Word> sets(n_sets * w, 0);
  std::vector<std::size_t> last_write(V, 0), last_read(T * V, 0);
  auto set = [&](std::size_t s) { return sets.data() + s * w; };
  auto has = [&](std::size_t s, std::size_t m) { return (set(s)[m / 64] >> (m % 64)) & 1u; };
  auto defined = [&](std::size_t s) {
    for (std::size_t i = 0; i < w; ++i)
      if (set(s)[i]) return true;
    return false;
  };
  auto reset_to = [&](std::size_t s, std::size_t m) {
    std::fill(set(s), set(s) + w, 0);
    set(s)[m / 64] |= Word{1} << (m % 64);
  };
  // every set holding `from` gains `to`
  auto propagate = [&](std::size_t from, std::size_t to) {
    const Word fbit = Word{1} << (from % 64), tbit = Word{1} << (to % 64);
    for (std::size_t s = 0; s < n_sets; ++s) {
      Word* p = set(s);
      if (p[from / 64] & fbit) p[to / 64] |= tbit;
    }
  };

  std::optional<RacePair> found;
  const auto labels = trace.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto& l = labels[j];
    const std::size_t t = l.thread.value;
    const std::size_t index = j + 1;
    switch (l.op) {
      case OpKind::Read:
      case OpKind::Write: {
        const std::size_t x = l.operand;
        std::size_t partner = 0;
        if (defined(x) && !has(x, t)) partner = last_write[x];
        if (l.op == OpKind::Write)
          for (std::size_t o = 0; o < T; ++o) {
            std::size_t r = V + o * V + x;
            if (defined(r) && !has(r, t)) partner = std::max(partner, last_read[o * V + x]);
          }
        if (partner != 0 && !found) found = RacePair{partner, index, l.var()};
        if (l.op == OpKind::Read) {
          reset_to(V + t * V + x, t);
          last_read[t * V + x] = index;
        } else {
          reset_to(x, t);
          last_write[x] = index;
        }
        break;
      }
      case OpKind::Acquire:
        propagate(u.index(SyncObject::lock(l.lock())), t);
        break;
      case OpKind::Release:
        propagate(t, u.index(SyncObject::lock(l.lock())));
        break;
      case OpKind::Fork:
        propagate(t, l.operand);
        break;
      case OpKind::Join:
        propagate(l.operand, t);
        break;
    }
  }
  return found;
}

HbClosure::HbClosure(const Trace& trace) : trace_(&trace), n_(trace.size()) {
  if (n_ > oracle_cap())
    throw CapExceeded("trace has " + std::to_string(n_) + " events; oracle cap is " + std::to_string(oracle_cap()));
  words_ = (n_ + 63) / 64;
  pred_.assign(n_ * words_, 0);
  for (std::size_t j = 0; j < n_; ++j) {
    Word* row = pred_.data() + j * words_;
    row[j / 64] |= Word{1} << (j % 64);
    const auto& b = trace.label(j + 1);
    for (std::size_t i = 0; i < j; ++i) {
      const auto& a = trace.label(i + 1);
      bool edge = a.thread == b.thread ||
                  (a.op == OpKind::Release && b.op == OpKind::Acquire && a.operand == b.operand) ||
                  (a.op == OpKind::Fork && a.target() == b.thread) ||
                  (b.op == OpKind::Join && b.target() == a.thread);
      if (!edge) continue;
      const Word* from = pred_.data() + i * words_;
      for (std::size_t k = 0; k < words_; ++k) row[k] |= from[k];
    }
  }
}

bool HbClosure::ordered(std::size_t i, std::size_t j) const {
  if (i == 0 || j == 0 || i > n_ || j > n_) throw UsageError("event index out of range");
  --i;
  --j;
  return (pred_[j * words_ + i / 64] >> (i % 64)) & 1u;
}

std::vector<RacePair> HbClosure::races() const {
  std::vector<RacePair> out;
  for (std::size_t j = 2; j <= n_; ++j)
    for (std::size_t i = 1; i < j; ++i) {
      const auto& a = trace_->label(i);
      const auto& b = trace_->label(j);
      if (conflicting(a, b) && !ordered(i, j)) out.push_back({i, j, a.var()});
    }
  return out;
}

bool HbClosure::has_race() const {
  for (std::size_t j = 2; j <= n_; ++j)
    for (std::size_t i = 1; i < j; ++i)
      if (conflicting(trace_->label(i), trace_->label(j)) && !ordered(i, j)) return true;
  return false;
}

AfterBefore after_before_oracle(const Trace& trace, const HbClosure& hb, std::size_t index) {
  AfterBefore out;
  trace.event(index);  // range check
  for (std::size_t k = 1; k <= trace.size(); ++k) {
    const auto& l = trace.label(k);
    if (hb.ordered(index, k)) {
      out.after.insert(SyncObject::thread(l.thread));
      if (l.op == OpKind::Fork) out.after.insert(SyncObject::thread(l.target()));
      if (l.op == OpKind::Release) out.after.insert(SyncObject::lock(l.lock()));
    }
    if (hb.ordered(k, index)) {
      out.before.insert(SyncObject::thread(l.thread));
      if (l.op == OpKind::Join) out.before.insert(SyncObject::thread(l.target()));
      if (l.op == OpKind::Acquire) out.before.insert(SyncObject::lock(l.lock()));
    }
  }
  return out;
}

AfterBefore after_before_oracle(const Trace& trace, std::size_t index) {
  HbClosure hb(trace);
  return after_before_oracle(trace, hb, index);
}

HbSummary brute_force_summary(const Trace& trace, const Universe& u) {
  HbSummary s(u);
  if (trace.empty()) return s;
  HbClosure hb(trace);
  s.race = hb.has_race();

  auto fill = [&](std::size_t slot, const SyncSet& set) {
    for (auto v : set) {
      std::size_t i = u.index(v);
      s.slot(slot)[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  };
  // first/last witness positions, scanned directly from the definitions
  const std::size_t S = u.sync(), T = u.threads, V = u.vars;
  std::vector<std::size_t> first_tj(S, 0), last_tf(S, 0), first_r(T * V, 0), last_r(T * V, 0), first_w(V, 0),
      last_w(V, 0);
  auto first = [](std::size_t& slot, std::size_t k) {
    if (slot == 0) slot = k;
  };
  for (std::size_t k = 1; k <= trace.size(); ++k) {
    const auto& l = trace.label(k);
    const std::size_t t = l.thread.value;
    first(first_tj[t], k);
    last_tf[t] = k;
    switch (l.op) {
      case OpKind::Read:
        first(first_r[t * V + l.operand], k);
        last_r[t * V + l.operand] = k;
        break;
      case OpKind::Write:
        first(first_w[l.operand], k);
        last_w[l.operand] = k;
        break;
      case OpKind::Acquire:
        first(first_tj[T + l.operand], k);
        break;
      case OpKind::Release:
        last_tf[T + l.operand] = k;
        break;
      case OpKind::Fork:
        last_tf[l.operand] = k;
        break;
      case OpKind::Join:
        first(first_tj[l.operand], k);
        break;
    }
  }
  auto after = [&](std::size_t slot, std::size_t k) {
    if (k) fill(slot, after_before_oracle(trace, hb, k).after);
  };
  auto before = [&](std::size_t slot, std::size_t k) {
    if (k) fill(slot, after_before_oracle(trace, hb, k).before);
  };
  for (std::size_t v = 0; v < S; ++v) {
    after(s.af_slot(v), first_tj[v]);
    before(s.bl_slot(v), last_tf[v]);
  }
  for (std::size_t x = 0; x < V; ++x) {
    after(s.aw_slot(x), last_w[x]);
    before(s.bw_slot(x), first_w[x]);
    for (std::size_t t = 0; t < T; ++t) {
      after(s.ar_slot(t, x), last_r[t * V + x]);
      before(s.br_slot(t, x), first_r[t * V + x]);
    }
  }
  return s;
}

}  // namespace ziptrace
