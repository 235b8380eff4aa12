#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symbols.hpp"

namespace ziptrace {

/// A labelled position. Indices are 1-based and equal trace order.
struct Event {
  std::size_t index = 0;
  EventLabel label;

  bool operator==(const Event&) const = default;
};

/// Immutable sequence of events together with the names they refer to.
class Trace {
 public:
  Trace() = default;
  Trace(Symbols symbols, std::vector<EventLabel> labels)
      : symbols_(std::move(symbols)), labels_(std::move(labels)) {}

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  /// 1-based.
  Event event(std::size_t index) const;
  const EventLabel& label(std::size_t index) const { return labels_.at(index - 1); }

  std::span<const EventLabel> labels() const { return labels_; }
  const Symbols& symbols() const { return symbols_; }

  /// Events [first, last] (1-based, inclusive) as a standalone trace.
  Trace slice(std::size_t first, std::size_t last) const;

  bool operator==(const Trace& other) const;

 private:
  Symbols symbols_;
  std::vector<EventLabel> labels_;
};

Trace parse_trace(std::string_view text);
Trace load_trace(const std::string& path);
std::string serialize_trace(const Trace& trace);

/// match(e) for every position: the matching acquire of a release, or the
/// matching release of an acquire. Index 0 of the result is unused.
std::vector<std::optional<std::size_t>> match_table(const Trace& trace);

/// Throws UsageError when `index` is out of range or not an acquire/release.
std::optional<Event> match_event(const Trace& trace, std::size_t index);

std::vector<Event> project(const Trace& trace, ThreadId t);

struct TraceStats {
  std::size_t n_events = 0;
  std::set<ThreadId> threads;
  std::set<LockId> locks;
  std::set<VarId> vars;
  std::set<std::pair<ThreadId, VarId>> rvars;
  std::set<VarId> wvars;
  std::size_t max_reentrancy = 0;
};

TraceStats trace_stats(const Trace& trace);

/// Positions of reads_σ(t,x) / writes_σ(x), ascending.
std::vector<std::size_t> reads_of(const Trace& trace, ThreadId t, VarId x);
std::vector<std::size_t> writes_of(const Trace& trace, VarId x);

std::optional<std::size_t> first_of(std::span<const std::size_t> positions);
std::optional<std::size_t> last_of(std::span<const std::size_t> positions);

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Warning;
  std::size_t event = 0;  // 0 when not tied to an event
  std::string message;
};

std::vector<Diagnostic> validate(const Trace& trace);

bool has_errors(std::span<const Diagnostic> diagnostics);

}  // namespace ziptrace
