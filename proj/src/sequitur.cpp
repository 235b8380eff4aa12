#include "sequitur.hpp"

#include <unordered_map>

namespace ziptrace {

namespace {

// Symbol codes: terminal k -> 2k+1, rule r -> 2r+2. Guards carry 0.
constexpr std::uint32_t terminal_code(std::uint32_t k) { return 2 * k + 1; }
constexpr std::uint32_t rule_code(std::uint32_t r) { return 2 * r + 2; }
constexpr bool is_rule_code(std::uint32_t c) { return c != 0 && c % 2 == 0; }
constexpr std::uint32_t code_rule(std::uint32_t c) { return c / 2 - 1; }
constexpr std::uint32_t code_terminal(std::uint32_t c) { return c / 2; }

std::uint64_t digram_key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

constexpr std::int32_t kNone = -1;

// Linked-list Sequitur after the classic reference implementation. Nodes
// live in a pool and are addressed by index; each rule is a circular list
// closed by a guard node.
class Builder {
 public:
  Builder() {
    new_rule();
    digrams_.reserve(1024);
  }

  void push(std::uint32_t terminal) {
    std::uint32_t r0 = 0;
    insert_after(last(r0), new_node(terminal_code(terminal)));
    std::int32_t l = last(r0);
    if (prev(l) != guard(r0)) check(prev(l));
  }

  // Live rules as code vectors indexed by builder rule id; dead rules empty.
  std::vector<std::vector<std::uint32_t>> bodies() const {
    std::vector<std::vector<std::uint32_t>> out(rules_.size());
    for (std::uint32_t r = 0; r < rules_.size(); ++r) {
      if (!rules_[r].alive) continue;
      for (std::int32_t n = first(r); n != guard(r); n = next(n)) out[r].push_back(nodes_[n].code);
    }
    return out;
  }

 private:
  struct Node {
    std::uint32_t code = 0;
    std::uint32_t rule = 0;  // owning rule for guards, referenced rule otherwise
    std::int32_t prev = kNone;
    std::int32_t next = kNone;
    bool guard = false;
  };
  struct Rule {
    std::int32_t guard = kNone;
    std::uint32_t count = 0;
    bool alive = true;
  };

  std::vector<Node> nodes_;
  std::vector<std::int32_t> free_;
  std::vector<Rule> rules_;
  std::unordered_map<std::uint64_t, std::int32_t> digrams_;

  std::int32_t next(std::int32_t n) const { return nodes_[n].next; }
  std::int32_t prev(std::int32_t n) const { return nodes_[n].prev; }
  bool is_guard(std::int32_t n) const { return nodes_[n].guard; }
  bool is_nonterminal(std::int32_t n) const { return !nodes_[n].guard && is_rule_code(nodes_[n].code); }
  std::int32_t guard(std::uint32_t r) const { return rules_[r].guard; }
  std::int32_t first(std::uint32_t r) const { return next(guard(r)); }
  std::int32_t last(std::uint32_t r) const { return prev(guard(r)); }
  std::uint64_t key(std::int32_t n) const { return digram_key(nodes_[n].code, nodes_[next(n)].code); }

  std::int32_t alloc() {
    if (!free_.empty()) {
      auto n = free_.back();
      free_.pop_back();
      nodes_[n] = Node{};
      return n;
    }
    nodes_.emplace_back();
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t new_node(std::uint32_t code) {
    auto n = alloc();
    nodes_[n].code = code;
    if (is_rule_code(code)) {
      nodes_[n].rule = code_rule(code);
      ++rules_[nodes_[n].rule].count;
    }
    return n;
  }

  std::uint32_t new_rule() {
    auto r = static_cast<std::uint32_t>(rules_.size());
    auto g = alloc();
    nodes_[g].guard = true;
    nodes_[g].rule = r;
    nodes_[g].prev = nodes_[g].next = g;
    rules_.push_back({g, 0, true});
    return r;
  }

  void delete_digram(std::int32_t n) {
    if (is_guard(n) || is_guard(next(n))) return;
    auto it = digrams_.find(key(n));
    if (it != digrams_.end() && it->second == n) digrams_.erase(it);
  }

  void join(std::int32_t left, std::int32_t right) {
    if (next(left) != kNone) {
      delete_digram(left);
      // Triples such as "bbb" keep only the second pair in the table; when
      // that pair goes away the first one must be remembered.
      std::int32_t rp = prev(right), rn = next(right);
      if (rp != kNone && rn != kNone && !is_guard(right) && !is_guard(rp) && !is_guard(rn) &&
          nodes_[right].code == nodes_[rp].code && nodes_[right].code == nodes_[rn].code)
        digrams_[key(right)] = right;
      std::int32_t lp = prev(left), ln = next(left);
      if (lp != kNone && ln != kNone && !is_guard(left) && !is_guard(lp) && !is_guard(ln) &&
          nodes_[left].code == nodes_[ln].code && nodes_[left].code == nodes_[lp].code)
        digrams_[key(lp)] = lp;
    }
    nodes_[left].next = right;
    nodes_[right].prev = left;
  }

  void insert_after(std::int32_t at, std::int32_t n) {
    join(n, next(at));
    join(at, n);
  }

  void delete_node(std::int32_t n) {
    join(prev(n), next(n));
    delete_digram(n);
    if (is_nonterminal(n)) --rules_[nodes_[n].rule].count;
    free_.push_back(n);
  }

  bool check(std::int32_t n) {
    if (is_guard(n) || is_guard(next(n))) return false;
    auto [it, inserted] = digrams_.try_emplace(key(n), n);
    if (inserted) return false;
    std::int32_t m = it->second;
    if (m == n) return false;
    if (next(m) != n) match(n, m);
    return true;
  }

  void substitute(std::int32_t n, std::uint32_t r) {
    std::int32_t q = prev(n);
    delete_node(next(q));
    delete_node(next(q));
    insert_after(q, new_node(rule_code(r)));
    if (!check(q)) check(next(q));
  }

  void match(std::int32_t ss, std::int32_t m) {
    std::uint32_t r;
    if (is_guard(prev(m)) && is_guard(next(next(m)))) {
      r = nodes_[prev(m)].rule;
      substitute(ss, r);
    } else {
      r = new_rule();
      std::uint32_t a = nodes_[ss].code;
      std::uint32_t b = nodes_[next(ss)].code;
      insert_after(last(r), new_node(a));
      insert_after(last(r), new_node(b));
      substitute(m, r);
      substitute(ss, r);
      digrams_[key(first(r))] = first(r);
    }
    if (!rules_[r].alive) return;
    std::int32_t f = first(r);
    if (is_nonterminal(f) && rules_[nodes_[f].rule].count == 1) expand(f);
  }

  // `n` is the last reference to its rule: splice the body in its place.
  void expand(std::int32_t n) {
    std::uint32_t r = nodes_[n].rule;
    std::int32_t left = prev(n), right = next(n);
    std::int32_t f = first(r), l = last(r);

    delete_digram(left);
    delete_digram(n);
    free_.push_back(rules_[r].guard);
    free_.push_back(n);
    rules_[r].alive = false;
    rules_[r].count = 0;

    nodes_[left].next = f;
    nodes_[f].prev = left;
    nodes_[l].next = right;
    nodes_[right].prev = l;

    for (std::int32_t j : {left, l})
      if (!is_guard(j) && !is_guard(next(j))) digrams_.try_emplace(key(j), j);
  }
};

using Bodies = std::vector<std::vector<std::uint32_t>>;

std::vector<std::uint32_t> reference_counts(const Bodies& rules, const std::vector<bool>& alive) {
  std::vector<std::uint32_t> count(rules.size(), 0);
  for (std::size_t r = 0; r < rules.size(); ++r)
    if (alive[r])
      for (auto c : rules[r])
        if (is_rule_code(c)) ++count[code_rule(c)];
  return count;
}

// Inlines rules referenced once and drops unreferenced ones.
bool enforce_utility(Bodies& rules, std::vector<bool>& alive) {
  bool changed = false;
  for (;;) {
    auto count = reference_counts(rules, alive);
    bool any = false;
    for (std::uint32_t r = 1; r < rules.size(); ++r) {
      if (!alive[r] || count[r] >= 2) continue;
      any = changed = true;
      alive[r] = false;
      if (count[r] == 0) continue;
      for (std::size_t p = 0; p < rules.size(); ++p) {
        if (!alive[p]) continue;
        auto& body = rules[p];
        for (std::size_t i = 0; i < body.size(); ++i) {
          if (body[i] != rule_code(r)) continue;
          std::vector<std::uint32_t> inner = rules[r];
          body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
          body.insert(body.begin() + static_cast<std::ptrdiff_t>(i), inner.begin(), inner.end());
          goto next_rule;
        }
      }
    next_rule:
      rules[r].clear();
      break;  // counts are stale now
    }
    if (!any) return changed;
  }
}

// Resolves one repeated digram; returns false when none remain.
bool fix_one_digram(Bodies& rules, std::vector<bool>& alive) {
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::size_t>> seen;
  for (std::uint32_t r = 0; r < rules.size(); ++r) {
    if (!alive[r]) continue;
    const auto& body = rules[r];
    for (std::size_t i = 0; i + 1 < body.size(); ++i) {
      auto k = digram_key(body[i], body[i + 1]);
      auto [it, inserted] = seen.try_emplace(k, r, i);
      if (inserted) continue;
      auto [r0, p0] = it->second;
      if (r0 == r && p0 + 1 == i) continue;  // overlapping, as in "aaa"

      auto replace = [&](std::uint32_t rule, std::size_t pos, std::uint32_t with) {
        auto& b = rules[rule];
        b[pos] = rule_code(with);
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
      };
      if (r0 != 0 && rules[r0].size() == 2) {
        replace(r, i, r0);
      } else if (r != 0 && body.size() == 2) {
        replace(r0, p0, r);
      } else {
        auto fresh = static_cast<std::uint32_t>(rules.size());
        std::vector<std::uint32_t> pair{body[i], body[i + 1]};
        replace(r, i, fresh);  // later occurrence first keeps p0 valid
        replace(r0, p0, fresh);
        rules.push_back(std::move(pair));
        alive.push_back(true);
      }
      return true;
    }
  }
  return false;
}

void enforce_invariants(Bodies& rules, std::vector<bool>& alive) {
  constexpr int kMaxRounds = 100000;
  for (int round = 0; round < kMaxRounds; ++round) {
    bool changed = enforce_utility(rules, alive);
    if (fix_one_digram(rules, alive)) changed = true;
    if (!changed) return;
  }
}

}  // namespace

Slp sequitur_compress(const Trace& trace) {
  std::vector<EventLabel> alphabet;
  std::unordered_map<EventLabel, std::uint32_t, EventLabelHash> index;
  Builder builder;
  for (const auto& l : trace.labels()) {
    auto [it, inserted] = index.try_emplace(l, static_cast<std::uint32_t>(alphabet.size()));
    if (inserted) alphabet.push_back(l);
    builder.push(it->second);
  }

  Bodies rules = builder.bodies();
  std::vector<bool> alive(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) alive[r] = r == 0 || !rules[r].empty();
  enforce_invariants(rules, alive);

  // Renumber: start is @0, the rest by first appearance.
  std::vector<std::int64_t> id(rules.size(), -1);
  std::vector<std::uint32_t> order;
  std::uint32_t next_id = 0;
  struct Frame {
    std::uint32_t rule;
    std::size_t pos;
  };
  std::vector<Frame> stack{{0, 0}};
  id[0] = next_id++;
  order.push_back(0);
  while (!stack.empty()) {
    Frame& top = stack.back();
    const auto& body = rules[top.rule];
    if (top.pos == body.size()) {
      stack.pop_back();
      continue;
    }
    auto c = body[top.pos++];
    if (!is_rule_code(c)) continue;
    auto r = code_rule(c);
    if (id[r] >= 0) continue;
    id[r] = next_id++;
    order.push_back(r);
    stack.push_back({r, 0});
  }

  Slp slp;
  slp.symbols = trace.symbols();
  slp.start = 0;
  for (auto r : order) {
    RuleBody body;
    body.reserve(rules[r].size());
    for (auto c : rules[r])
      body.push_back(is_rule_code(c) ? Symbol::rule(static_cast<std::uint32_t>(id[code_rule(c)]))
                                     : Symbol::terminal(alphabet[code_terminal(c)]));
    slp.rules.emplace(static_cast<std::uint32_t>(id[r]), std::move(body));
  }
  return slp;
}

namespace {

std::uint64_t symbol_code(const Symbol& s, std::unordered_map<EventLabel, std::uint32_t, EventLabelHash>& labels) {
  if (!s.is_terminal()) return rule_code(s.rule_id());
  auto [it, inserted] = labels.try_emplace(s.label(), static_cast<std::uint32_t>(labels.size()));
  (void)inserted;
  return terminal_code(it->second);
}

}  // namespace

std::vector<std::string> digram_violations(const Slp& slp) {
  std::vector<std::string> out;
  std::unordered_map<EventLabel, std::uint32_t, EventLabelHash> labels;
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::size_t>> seen;
  for (const auto& [id, body] : slp.rules) {
    for (std::size_t i = 0; i + 1 < body.size(); ++i) {
      auto k = (symbol_code(body[i], labels) << 32) | symbol_code(body[i + 1], labels);
      auto [it, inserted] = seen.try_emplace(k, id, i);
      if (inserted) continue;
      auto [r0, p0] = it->second;
      if (r0 == id && p0 + 1 == i) continue;
      out.push_back("@" + std::to_string(r0) + ":" + std::to_string(p0) + " @" + std::to_string(id) + ":" +
                    std::to_string(i));
    }
  }
  return out;
}

std::vector<std::uint32_t> utility_violations(const Slp& slp) {
  std::map<std::uint32_t, std::size_t> count;
  for (const auto& [id, body] : slp.rules) {
    (void)id;
    for (const auto& s : body)
      if (!s.is_terminal()) ++count[s.rule_id()];
  }
  std::vector<std::uint32_t> out;
  for (const auto& [id, body] : slp.rules) {
    (void)body;
    if (id != slp.start && count[id] < 2) out.push_back(id);
  }
  return out;
}

}  // namespace ziptrace
