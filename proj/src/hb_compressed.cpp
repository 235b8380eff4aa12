#include "hb_compressed.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <unordered_map>

namespace ziptrace {

namespace {

using Word = std::uint64_t;

void set_bit(Word* s, std::size_t i) { s[i / 64] |= Word{1} << (i % 64); }

bool is_empty(const Word* s, std::size_t w) {
  for (std::size_t i = 0; i < w; ++i)
    if (s[i]) return false;
  return true;
}

void or_into(Word* d, const Word* s, std::size_t w) {
  for (std::size_t i = 0; i < w; ++i) d[i] |= s[i];
}

void copy_into(Word* d, const Word* s, std::size_t w) { std::copy(s, s + w, d); }

bool disjoint(const Word* a, const Word* b, std::size_t w) {
  for (std::size_t i = 0; i < w; ++i)
    if (a[i] & b[i]) return false;
  return true;
}

template <class F>
void for_each_bit(const Word* s, std::size_t w, F&& f) {
  for (std::size_t i = 0; i < w; ++i) {
    Word x = s[i];
    while (x) {
      f(i * 64 + static_cast<std::size_t>(std::countr_zero(x)));
      x &= x - 1;
    }
  }
}

// Both sides of a test non-empty and sharing nothing.
bool unordered(const Word* a, const Word* b, std::size_t w) {
  return !is_empty(a, w) && !is_empty(b, w) && disjoint(a, b, w);
}

}  // namespace

std::string format_sync(const Symbols& symbols, SyncObject u) {
  return u.kind == SyncObject::Kind::Thread ? symbols.threads.name(u.id) : symbols.locks.name(u.id);
}

HbSummary::HbSummary(const Universe& u)
    : u_(u), words_(std::max<std::size_t>(1, (u.sync() + 63) / 64)) {
  std::size_t slots = 2 * u.sync() + 2 * u.threads * u.vars + 2 * u.vars;
  data_.assign(slots * words_, 0);
}

bool HbSummary::operator==(const HbSummary& other) const {
  return race == other.race && u_ == other.u_ && data_ == other.data_;
}

SyncSet HbSummary::decode(const std::uint64_t* s) const {
  SyncSet out;
  for_each_bit(s, words_, [&](std::size_t i) { out.insert(u_.object(i)); });
  return out;
}

HbSummary summarize_terminal(const EventLabel& label, const Universe& u) {
  HbSummary s(u);
  std::size_t t = label.thread.value;
  auto put = [&](std::size_t slot, std::initializer_list<std::size_t> members) {
    for (auto m : members) set_bit(s.slot(slot), m);
  };
  std::size_t self = t;
  switch (label.op) {
    case OpKind::Read:
      put(s.af_slot(self), {self});
      put(s.bl_slot(self), {self});
      put(s.ar_slot(t, label.operand), {self});
      put(s.br_slot(t, label.operand), {self});
      break;
    case OpKind::Write:
      put(s.af_slot(self), {self});
      put(s.bl_slot(self), {self});
      put(s.aw_slot(label.operand), {self});
      put(s.bw_slot(label.operand), {self});
      break;
    case OpKind::Acquire: {
      std::size_t l = u.index(SyncObject::lock(label.lock()));
      put(s.af_slot(self), {self});
      put(s.af_slot(l), {self});
      put(s.bl_slot(self), {self, l});
      break;
    }
    case OpKind::Release: {
      std::size_t l = u.index(SyncObject::lock(label.lock()));
      put(s.af_slot(self), {self, l});
      put(s.bl_slot(self), {self});
      put(s.bl_slot(l), {self});
      break;
    }
    case OpKind::Fork: {
      std::size_t child = label.operand;
      put(s.af_slot(self), {self, child});
      put(s.bl_slot(self), {self});
      put(s.bl_slot(child), {self});
      break;
    }
    case OpKind::Join: {
      std::size_t child = label.operand;
      put(s.af_slot(self), {self});
      put(s.af_slot(child), {self});
      put(s.bl_slot(self), {self, child});
      break;
    }
  }
  return s;
}

HbSummary combine(const HbSummary& b, const HbSummary& c) {
  const Universe& u = b.universe();
  if (!(u == c.universe())) throw UsageError("combining summaries over different universes");
  HbSummary a(u);
  const std::size_t w = a.words();

  a.race = b.race || c.race;
  for (std::size_t x = 0; x < u.vars && !a.race; ++x) {
    const Word* aw_b = b.slot(b.aw_slot(x));
    const Word* bw_c = c.slot(c.bw_slot(x));
    if (unordered(aw_b, bw_c, w)) a.race = true;
    for (std::size_t t = 0; t < u.threads && !a.race; ++t) {
      if (unordered(aw_b, c.slot(c.br_slot(t, x)), w) || unordered(b.slot(b.ar_slot(t, x)), bw_c, w))
        a.race = true;
    }
  }

  // dst |= af_C(v) for v in src
  auto after_right = [&](Word* dst, const Word* src) {
    for_each_bit(src, w, [&](std::size_t v) { or_into(dst, c.slot(c.af_slot(v)), w); });
  };
  // dst |= bl_B(v) for v in src
  auto before_left = [&](Word* dst, const Word* src) {
    for_each_bit(src, w, [&](std::size_t v) { or_into(dst, b.slot(b.bl_slot(v)), w); });
  };

  for (std::size_t i = 0; i < u.sync(); ++i) {
    Word* af = a.slot(a.af_slot(i));
    const Word* af_b = b.slot(b.af_slot(i));
    copy_into(af, af_b, w);
    or_into(af, c.slot(c.af_slot(i)), w);
    after_right(af, af_b);

    Word* bl = a.slot(a.bl_slot(i));
    const Word* bl_c = c.slot(c.bl_slot(i));
    copy_into(bl, bl_c, w);
    or_into(bl, b.slot(b.bl_slot(i)), w);
    before_left(bl, bl_c);
  }

  auto last_access = [&](std::size_t sa, std::size_t sb, std::size_t sc) {
    const Word* right = c.slot(sc);
    if (!is_empty(right, w)) {
      copy_into(a.slot(sa), right, w);
    } else {
      copy_into(a.slot(sa), b.slot(sb), w);
      after_right(a.slot(sa), b.slot(sb));
    }
  };
  auto first_access = [&](std::size_t sa, std::size_t sb, std::size_t sc) {
    const Word* left = b.slot(sb);
    if (!is_empty(left, w)) {
      copy_into(a.slot(sa), left, w);
    } else {
      copy_into(a.slot(sa), c.slot(sc), w);
      before_left(a.slot(sa), c.slot(sc));
    }
  };
  for (std::size_t x = 0; x < u.vars; ++x) {
    last_access(a.aw_slot(x), b.aw_slot(x), c.aw_slot(x));
    first_access(a.bw_slot(x), b.bw_slot(x), c.bw_slot(x));
    for (std::size_t t = 0; t < u.threads; ++t) {
      last_access(a.ar_slot(t, x), b.ar_slot(t, x), c.ar_slot(t, x));
      first_access(a.br_slot(t, x), b.br_slot(t, x), c.br_slot(t, x));
    }
  }
  return a;
}

HbSummary fold_summary(std::span<const EventLabel> labels, const Universe& u) {
  if (labels.empty()) return HbSummary(u);
  HbSummary acc = summarize_terminal(labels.front(), u);
  for (std::size_t i = 1; i < labels.size(); ++i) acc = combine(acc, summarize_terminal(labels[i], u));
  return acc;
}

HbSummary vc_shortcut_summary(std::span<const EventLabel> labels, const Universe& u) {
  HbSummary s(u);
  if (labels.empty()) return s;
  const std::size_t T = u.threads, S = u.sync(), V = u.vars, k = labels.size();
  using Clock = std::uint32_t;
  constexpr Clock kNever = std::numeric_limits<Clock>::max();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<Clock> thread_vc(T * T, 0), lock_vc(u.locks * T, 0), event_vc(k * T);
  // Coordinatewise max of the clocks of u's After-witnesses (own events and
  // forks of u for threads, releases for locks), and per thread the
  // smallest epoch of u's Before-witnesses (own events and joins of u for
  // threads, acquires for locks).
  std::vector<Clock> after_witness(S * T, 0), before_witness(S * T, kNever);
  std::vector<Clock> last_read(T * V, 0), last_write(T * V, 0);

  std::vector<std::size_t> first_tj(S, kNone), last_tf(S, kNone);
  std::vector<std::size_t> first_r(T * V, kNone), last_r(T * V, kNone), first_w(V, kNone), last_w(V, kNone);

  auto join_into = [&](Clock* d, const Clock* src) {
    for (std::size_t i = 0; i < T; ++i) d[i] = std::max(d[i], src[i]);
  };

  for (std::size_t j = 0; j < k; ++j) {
    const auto& l = labels[j];
    const std::size_t t = l.thread.value;
    Clock* ct = &thread_vc[t * T];
    if (l.op == OpKind::Acquire) join_into(ct, &lock_vc[l.operand * T]);
    if (l.op == OpKind::Join) join_into(ct, &thread_vc[l.operand * T]);
    ++ct[t];
    Clock* vc = &event_vc[j * T];
    std::copy(ct, ct + T, vc);
    const Clock epoch = ct[t];

    join_into(&after_witness[t * T], vc);
    before_witness[t * T + t] = std::min(before_witness[t * T + t], epoch);
    if (first_tj[t] == kNone) first_tj[t] = j;
    last_tf[t] = j;

    switch (l.op) {
      case OpKind::Read: {
        const std::size_t x = l.operand;
        for (std::size_t o = 0; o < T && !s.race; ++o)
          if (o != t && last_write[o * V + x] > vc[o]) s.race = true;
        last_read[t * V + x] = epoch;
        if (first_r[t * V + x] == kNone) first_r[t * V + x] = j;
        last_r[t * V + x] = j;
        break;
      }
      case OpKind::Write: {
        const std::size_t x = l.operand;
        for (std::size_t o = 0; o < T && !s.race; ++o)
          if (o != t && (last_write[o * V + x] > vc[o] || last_read[o * V + x] > vc[o])) s.race = true;
        last_write[t * V + x] = epoch;
        if (first_w[x] == kNone) first_w[x] = j;
        last_w[x] = j;
        break;
      }
      case OpKind::Acquire: {
        const std::size_t li = T + l.operand;
        before_witness[li * T + t] = std::min(before_witness[li * T + t], epoch);
        if (first_tj[li] == kNone) first_tj[li] = j;
        break;
      }
      case OpKind::Release: {
        const std::size_t li = T + l.operand;
        join_into(&after_witness[li * T], vc);
        last_tf[li] = j;
        join_into(&lock_vc[l.operand * T], ct);
        break;
      }
      case OpKind::Fork: {
        const std::size_t child = l.operand;
        join_into(&after_witness[child * T], vc);
        last_tf[child] = j;
        join_into(&thread_vc[child * T], ct);
        break;
      }
      case OpKind::Join: {
        const std::size_t child = l.operand;
        before_witness[child * T + t] = std::min(before_witness[child * T + t], epoch);
        if (first_tj[child] == kNone) first_tj[child] = j;
        break;
      }
    }
  }

  auto after = [&](std::size_t i, Word* dst) {
    if (i == kNone) return;
    const std::size_t t = labels[i].thread.value;
    const Clock epoch = event_vc[i * T + t];
    for (std::size_t v = 0; v < S; ++v)
      if (after_witness[v * T + t] >= epoch) set_bit(dst, v);
  };
  auto before = [&](std::size_t j, Word* dst) {
    if (j == kNone) return;
    const Clock* vc = &event_vc[j * T];
    for (std::size_t v = 0; v < S; ++v)
      for (std::size_t o = 0; o < T; ++o)
        if (before_witness[v * T + o] <= vc[o]) {
          set_bit(dst, v);
          break;
        }
  };

  for (std::size_t v = 0; v < S; ++v) {
    after(first_tj[v], s.slot(s.af_slot(v)));
    before(last_tf[v], s.slot(s.bl_slot(v)));
  }
  for (std::size_t x = 0; x < V; ++x) {
    after(last_w[x], s.slot(s.aw_slot(x)));
    before(first_w[x], s.slot(s.bw_slot(x)));
    for (std::size_t t = 0; t < T; ++t) {
      after(last_r[t * V + x], s.slot(s.ar_slot(t, x)));
      before(first_r[t * V + x], s.slot(s.br_slot(t, x)));
    }
  }
  return s;
}

HbResult analyze_slp_hb(const Slp& slp, const HbOptions& options) {
  const Universe u = Universe::of(slp.symbols);
  const auto order = bottom_up_order(slp);
  std::unordered_map<std::uint32_t, HbSummary> memo;
  memo.reserve(order.size());
  std::unordered_map<EventLabel, HbSummary, EventLabelHash> terminals;
  auto summary_of = [&](const Symbol& sym) -> const HbSummary& {
    if (!sym.is_terminal()) return memo.at(sym.rule_id());
    auto it = terminals.find(sym.label());
    if (it == terminals.end()) it = terminals.emplace(sym.label(), summarize_terminal(sym.label(), u)).first;
    return it->second;
  };

  std::vector<EventLabel> run;
  for (auto id : order) {
    const RuleBody& body = slp.rules.at(id);
    bool all_terminal = std::all_of(body.begin(), body.end(), [](const Symbol& s) { return s.is_terminal(); });
    HbSummary sum(u);
    if (body.empty()) {
      // empty grammar: nothing to summarize
    } else if (options.vc_shortcut && all_terminal && body.size() > 1) {
      run.clear();
      for (const auto& s : body) run.push_back(s.label());
      sum = vc_shortcut_summary(run, u);
    } else {
      sum = summary_of(body.front());
      for (std::size_t i = 1; i < body.size(); ++i) sum = combine(sum, summary_of(body[i]));
    }
    memo.emplace(id, std::move(sum));
  }

  HbResult result;
  result.race_found = memo.at(slp.start).race;
  if (options.keep_summaries)
    for (auto& [id, sum] : memo) result.summaries.emplace(id, std::move(sum));
  return result;
}

}  // namespace ziptrace
