#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "symbols.hpp"
#include "trace.hpp"

namespace ziptrace {

struct RuleRef {
  std::uint32_t id = 0;
  auto operator<=>(const RuleRef&) const = default;
};

/// Terminal (an event label) or nonterminal reference.
struct Symbol {
  std::variant<EventLabel, RuleRef> value;

  static Symbol terminal(EventLabel l) { return Symbol{l}; }
  static Symbol rule(std::uint32_t id) { return Symbol{RuleRef{id}}; }

  bool is_terminal() const { return std::holds_alternative<EventLabel>(value); }
  const EventLabel& label() const { return std::get<EventLabel>(value); }
  std::uint32_t rule_id() const { return std::get<RuleRef>(value).id; }

  bool operator==(const Symbol&) const = default;
};

using RuleBody = std::vector<Symbol>;

/// Straight-line program: one rule per nonterminal, acyclic, single string.
/// Terminals carry labels interned in `symbols`.
struct Slp {
  Symbols symbols;
  std::uint32_t start = 0;
  std::map<std::uint32_t, RuleBody> rules;

  std::uint32_t fresh_id() const { return rules.empty() ? 0 : rules.rbegin()->first + 1; }

  /// Same start, same rule ids, same bodies; terminals compare by name.
  bool operator==(const Slp& other) const;
};

/// Diagnostics for cycles, undefined references, unreachable and empty rules.
std::vector<Diagnostic> validate_slp(const Slp& slp);

/// Rule ids in reverse rank order: every rule appears after all rules it
/// references. Only rules reachable from the start rule are listed.
/// Throws GrammarError on cycles or undefined references.
std::vector<std::uint32_t> bottom_up_order(const Slp& slp);

Trace expand(const Slp& slp);

/// Expanded length of every reachable rule.
std::map<std::uint32_t, std::uint64_t> chunk_lengths(const Slp& slp);

/// Replaces each maximal run of at least `run_threshold` consecutive
/// terminals inside a rule that also references nonterminals by a fresh
/// nonterminal deriving that run.
Slp normalize(const Slp& slp, std::size_t run_threshold);

Slp parse_slp(std::string_view text);
Slp load_slp(const std::string& path);
std::string serialize_slp(const Slp& slp);

struct GrammarStats {
  std::size_t n_terminals = 0;     // distinct terminal labels
  std::size_t n_nonterminals = 0;  // rules
  std::size_t size = 0;            // n_terminals + n_nonterminals
  std::uint64_t expanded_length = 0;
  double compression_ratio = 0.0;  // expanded_length / size
};

GrammarStats grammar_stats(const Slp& slp);

}  // namespace ziptrace
