#include "slp.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ziptrace {

bool Slp::operator==(const Slp& other) const {
  if (start != other.start || rules.size() != other.rules.size()) return false;
  bool same_names = symbols == other.symbols;
  auto a = rules.begin();
  auto b = other.rules.begin();
  for (; a != rules.end(); ++a, ++b) {
    if (a->first != b->first || a->second.size() != b->second.size()) return false;
    for (std::size_t i = 0; i < a->second.size(); ++i) {
      const auto& x = a->second[i];
      const auto& y = b->second[i];
      if (x.is_terminal() != y.is_terminal()) return false;
      if (!x.is_terminal()) {
        if (x.rule_id() != y.rule_id()) return false;
      } else if (same_names ? x.label() != y.label()
                            : format_label(symbols, x.label()) != format_label(other.symbols, y.label())) {
        return false;
      }
    }
  }
  return true;
}

namespace {

enum class Mark : std::uint8_t { Unvisited, Active, Done };

// Iterative DFS from the start rule; children finish before parents.
// Reports the first cycle or undefined reference through `problem`.
std::vector<std::uint32_t> post_order(const Slp& slp, std::string& problem) {
  std::vector<std::uint32_t> order;
  if (!slp.rules.count(slp.start)) {
    problem = "start rule @" + std::to_string(slp.start) + " is not defined";
    return order;
  }
  std::map<std::uint32_t, Mark> mark;
  struct Frame {
    std::uint32_t id;
    std::size_t next;
  };
  std::vector<Frame> stack{{slp.start, 0}};
  mark[slp.start] = Mark::Active;
  while (!stack.empty()) {
    Frame& top = stack.back();
    const RuleBody& body = slp.rules.at(top.id);
    if (top.next == body.size()) {
      mark[top.id] = Mark::Done;
      order.push_back(top.id);
      stack.pop_back();
      continue;
    }
    const Symbol& s = body[top.next++];
    if (s.is_terminal()) continue;
    std::uint32_t child = s.rule_id();
    if (!slp.rules.count(child)) {
      problem = "rule @" + std::to_string(top.id) + " references undefined rule @" + std::to_string(child);
      return {};
    }
    Mark& m = mark[child];
    if (m == Mark::Active) {
      problem = "cycle through rule @" + std::to_string(child);
      return {};
    }
    if (m == Mark::Unvisited) {
      m = Mark::Active;
      stack.push_back({child, 0});
    }
  }
  return order;
}

}  // namespace

std::vector<std::uint32_t> bottom_up_order(const Slp& slp) {
  std::string problem;
  auto order = post_order(slp, problem);
  if (!problem.empty()) throw GrammarError(problem);
  return order;
}

std::vector<Diagnostic> validate_slp(const Slp& slp) {
  std::vector<Diagnostic> out;
  for (const auto& [id, body] : slp.rules) {
    for (const auto& s : body)
      if (!s.is_terminal() && !slp.rules.count(s.rule_id()))
        out.push_back({Severity::Error, 0,
                       "rule @" + std::to_string(id) + " references undefined rule @" + std::to_string(s.rule_id())});
    if (body.empty()) {
      if (id == slp.start)
        out.push_back({Severity::Warning, 0, "start rule @" + std::to_string(id) + " is empty (empty trace)"});
      else
        out.push_back({Severity::Error, 0, "rule @" + std::to_string(id) + " is empty"});
    }
  }
  if (!slp.rules.count(slp.start)) {
    out.push_back({Severity::Error, 0, "start rule @" + std::to_string(slp.start) + " is not defined"});
    return out;
  }

  // Cycle detection over every rule, not only the reachable ones.
  std::map<std::uint32_t, Mark> mark;
  for (const auto& [root, unused] : slp.rules) {
    (void)unused;
    if (mark[root] != Mark::Unvisited) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::Active;
    bool cyclic = false;
    while (!stack.empty() && !cyclic) {
      auto& [id, next] = stack.back();
      const RuleBody& body = slp.rules.at(id);
      if (next == body.size()) {
        mark[id] = Mark::Done;
        stack.pop_back();
        continue;
      }
      const Symbol& s = body[next++];
      if (s.is_terminal() || !slp.rules.count(s.rule_id())) continue;
      Mark& m = mark[s.rule_id()];
      if (m == Mark::Active) {
        out.push_back({Severity::Error, 0, "cycle through rule @" + std::to_string(s.rule_id())});
        cyclic = true;
      } else if (m == Mark::Unvisited) {
        m = Mark::Active;
        stack.push_back({s.rule_id(), 0});
      }
    }
    if (cyclic) return out;
  }

  std::set<std::uint32_t> reachable{slp.start};
  std::vector<std::uint32_t> work{slp.start};
  while (!work.empty()) {
    auto id = work.back();
    work.pop_back();
    for (const auto& s : slp.rules.at(id))
      if (!s.is_terminal() && slp.rules.count(s.rule_id()) && reachable.insert(s.rule_id()).second)
        work.push_back(s.rule_id());
  }
  for (const auto& [id, body] : slp.rules) {
    (void)body;
    if (!reachable.count(id)) out.push_back({Severity::Warning, 0, "rule @" + std::to_string(id) + " is unreachable"});
  }
  return out;
}

Trace expand(const Slp& slp) {
  auto diags = validate_slp(slp);
  for (const auto& d : diags)
    if (d.severity == Severity::Error) throw GrammarError(d.message);

  auto lengths = chunk_lengths(slp);
  std::vector<EventLabel> labels;
  labels.reserve(static_cast<std::size_t>(lengths.at(slp.start)));
  struct Frame {
    const RuleBody* body;
    std::size_t next;
  };
  std::vector<Frame> stack{{&slp.rules.at(slp.start), 0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.body->size()) {
      stack.pop_back();
      continue;
    }
    const Symbol& s = (*top.body)[top.next++];
    if (s.is_terminal())
      labels.push_back(s.label());
    else
      stack.push_back({&slp.rules.at(s.rule_id()), 0});
  }
  return Trace(slp.symbols, std::move(labels));
}

std::map<std::uint32_t, std::uint64_t> chunk_lengths(const Slp& slp) {
  std::map<std::uint32_t, std::uint64_t> len;
  for (auto id : bottom_up_order(slp)) {
    std::uint64_t n = 0;
    for (const auto& s : slp.rules.at(id)) n += s.is_terminal() ? 1 : len.at(s.rule_id());
    len[id] = n;
  }
  return len;
}

Slp normalize(const Slp& slp, std::size_t run_threshold) {
  if (run_threshold < 2) throw UsageError("run threshold must be at least 2");
  Slp out;
  out.symbols = slp.symbols;
  out.start = slp.start;
  out.rules = slp.rules;
  std::uint32_t next_id = slp.fresh_id();

  for (const auto& [id, body] : slp.rules) {
    bool has_rule = std::any_of(body.begin(), body.end(), [](const Symbol& s) { return !s.is_terminal(); });
    bool has_terminal = std::any_of(body.begin(), body.end(), [](const Symbol& s) { return s.is_terminal(); });
    if (!has_rule || !has_terminal) continue;

    RuleBody rewritten;
    std::size_t i = 0;
    while (i < body.size()) {
      if (!body[i].is_terminal()) {
        rewritten.push_back(body[i++]);
        continue;
      }
      std::size_t j = i;
      while (j < body.size() && body[j].is_terminal()) ++j;
      if (j - i >= run_threshold) {
        std::uint32_t fresh = next_id++;
        out.rules[fresh] = RuleBody(body.begin() + static_cast<std::ptrdiff_t>(i),
                                    body.begin() + static_cast<std::ptrdiff_t>(j));
        rewritten.push_back(Symbol::rule(fresh));
      } else {
        rewritten.insert(rewritten.end(), body.begin() + static_cast<std::ptrdiff_t>(i),
                         body.begin() + static_cast<std::ptrdiff_t>(j));
      }
      i = j;
    }
    out.rules[id] = std::move(rewritten);
  }
  return out;
}

namespace {

std::uint32_t parse_rule_id(std::string_view tok, std::size_t line) {
  if (tok.size() < 2 || tok.front() != '@') throw ParseError(line, "expected '@<id>', got '" + std::string(tok) + "'");
  std::uint64_t v = 0;
  for (char c : tok.substr(1)) {
    if (c < '0' || c > '9') throw ParseError(line, "bad rule id '" + std::string(tok) + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > 0xFFFFFFFFull) throw ParseError(line, "rule id too large '" + std::string(tok) + "'");
  }
  return static_cast<std::uint32_t>(v);
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Slp parse_slp(std::string_view text) {
  Slp slp;
  enum class Expect { Header, Start, Rules } expect = Expect::Header;
  std::size_t line_no = 0;
  std::size_t start_line = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    auto toks = split_spaces(line);
    switch (expect) {
      case Expect::Header:
        if (toks.size() != 2 || toks[0] != "slp" || toks[1] != "v1")
          throw ParseError(line_no, "expected header 'slp v1'");
        expect = Expect::Start;
        break;
      case Expect::Start:
        if (toks.size() != 2 || toks[0] != "start") throw ParseError(line_no, "expected 'start @<id>'");
        slp.start = parse_rule_id(toks[1], line_no);
        start_line = line_no;
        expect = Expect::Rules;
        break;
      case Expect::Rules: {
        if (toks.size() < 2 || toks[1] != ":=") throw ParseError(line_no, "expected '@<id> := <symbols>'");
        auto id = parse_rule_id(toks[0], line_no);
        if (slp.rules.count(id)) throw ParseError(line_no, "duplicate definition of rule @" + std::to_string(id));
        RuleBody body;
        body.reserve(toks.size() - 2);
        for (std::size_t k = 2; k < toks.size(); ++k) {
          if (toks[k].front() == '@')
            body.push_back(Symbol::rule(parse_rule_id(toks[k], line_no)));
          else
            body.push_back(Symbol::terminal(parse_label(toks[k], slp.symbols, line_no)));
        }
        slp.rules.emplace(id, std::move(body));
        break;
      }
    }
  }
  if (expect == Expect::Header) throw ParseError(line_no == 0 ? 1 : line_no, "empty grammar file");
  if (expect == Expect::Start) throw ParseError(line_no, "missing 'start @<id>' line");
  if (!slp.rules.count(slp.start))
    throw ParseError(start_line, "start rule @" + std::to_string(slp.start) + " is not defined");
  return slp;
}

Slp load_slp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_slp(buf.str());
}

std::string serialize_slp(const Slp& slp) {
  std::string out = "slp v1\nstart @" + std::to_string(slp.start) + "\n";
  for (const auto& [id, body] : slp.rules) {
    out += '@';
    out += std::to_string(id);
    out += " :=";
    for (const auto& s : body) {
      out += ' ';
      if (s.is_terminal()) {
        out += format_label(slp.symbols, s.label());
      } else {
        out += '@';
        out += std::to_string(s.rule_id());
      }
    }
    out += '\n';
  }
  return out;
}

GrammarStats grammar_stats(const Slp& slp) {
  GrammarStats g;
  std::unordered_set<EventLabel, EventLabelHash> terminals;
  for (const auto& [id, body] : slp.rules) {
    (void)id;
    for (const auto& s : body)
      if (s.is_terminal()) terminals.insert(s.label());
  }
  g.n_terminals = terminals.size();
  g.n_nonterminals = slp.rules.size();
  g.size = g.n_terminals + g.n_nonterminals;
  g.expanded_length = chunk_lengths(slp).at(slp.start);
  g.compression_ratio = g.size == 0 ? 0.0 : static_cast<double>(g.expanded_length) / static_cast<double>(g.size);
  return g;
}

}  // namespace ziptrace
