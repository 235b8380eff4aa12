#include "trace.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace ziptrace {

Event Trace::event(std::size_t index) const {
  if (index == 0 || index > labels_.size())
    throw UsageError("event index " + std::to_string(index) + " out of range 1.." + std::to_string(labels_.size()));
  return Event{index, labels_[index - 1]};
}

Trace Trace::slice(std::size_t first, std::size_t last) const {
  if (first == 0 || last > labels_.size() || first > last + 1) throw UsageError("bad slice bounds");
  return Trace(symbols_, std::vector<EventLabel>(labels_.begin() + static_cast<std::ptrdiff_t>(first - 1),
                                                 labels_.begin() + static_cast<std::ptrdiff_t>(last)));
}

bool Trace::operator==(const Trace& other) const {
  if (labels_.size() != other.labels_.size()) return false;
  if (symbols_ == other.symbols_) return labels_ == other.labels_;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (format_label(symbols_, labels_[i]) != format_label(other.symbols_, other.labels_[i])) return false;
  return true;
}

Trace parse_trace(std::string_view text) {
  Symbols symbols;
  std::vector<EventLabel> labels;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    labels.push_back(parse_label(line, symbols, line_no));
  }
  return Trace(std::move(symbols), std::move(labels));
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

std::string serialize_trace(const Trace& trace) {
  std::string out;
  out.reserve(trace.size() * 10);
  for (const auto& l : trace.labels()) {
    out += format_label(trace.symbols(), l);
    out += '\n';
  }
  return out;
}

std::vector<std::optional<std::size_t>> match_table(const Trace& trace) {
  std::vector<std::optional<std::size_t>> match(trace.size() + 1);
  // open acquires per (thread, lock), innermost last
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> open;
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    if (!l.is_lock_op()) continue;
    auto& stack = open[{l.thread.value, l.operand}];
    if (l.op == OpKind::Acquire) {
      stack.push_back(i);
    } else if (!stack.empty()) {
      match[i] = stack.back();
      match[stack.back()] = i;
      stack.pop_back();
    }
  }
  return match;
}

std::optional<Event> match_event(const Trace& trace, std::size_t index) {
  Event e = trace.event(index);
  if (!e.label.is_lock_op()) throw UsageError("event " + std::to_string(index) + " is not an acquire or release");
  auto table = match_table(trace);
  if (!table[index]) return std::nullopt;
  return trace.event(*table[index]);
}

std::vector<Event> project(const Trace& trace, ThreadId t) {
  std::vector<Event> out;
  for (std::size_t i = 1; i <= trace.size(); ++i)
    if (trace.label(i).thread == t) out.push_back(trace.event(i));
  return out;
}

TraceStats trace_stats(const Trace& trace) {
  TraceStats s;
  s.n_events = trace.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> depth;
  for (const auto& l : trace.labels()) {
    s.threads.insert(l.thread);
    switch (l.op) {
      case OpKind::Read:
        s.vars.insert(l.var());
        s.rvars.insert({l.thread, l.var()});
        break;
      case OpKind::Write:
        s.vars.insert(l.var());
        s.wvars.insert(l.var());
        break;
      case OpKind::Acquire: {
        s.locks.insert(l.lock());
        auto& d = depth[{l.thread.value, l.operand}];
        ++d;
        s.max_reentrancy = std::max(s.max_reentrancy, d);
        break;
      }
      case OpKind::Release: {
        s.locks.insert(l.lock());
        auto& d = depth[{l.thread.value, l.operand}];
        if (d > 0) --d;
        break;
      }
      case OpKind::Fork:
      case OpKind::Join:
        s.threads.insert(l.target());
        break;
    }
  }
  return s;
}

std::vector<std::size_t> reads_of(const Trace& trace, ThreadId t, VarId x) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    if (l.op == OpKind::Read && l.thread == t && l.var() == x) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> writes_of(const Trace& trace, VarId x) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    if (l.op == OpKind::Write && l.var() == x) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> first_of(std::span<const std::size_t> positions) {
  if (positions.empty()) return std::nullopt;
  return *std::min_element(positions.begin(), positions.end());
}

std::optional<std::size_t> last_of(std::span<const std::size_t> positions) {
  if (positions.empty()) return std::nullopt;
  return *std::max_element(positions.begin(), positions.end());
}

std::vector<Diagnostic> validate(const Trace& trace) {
  std::vector<Diagnostic> out;
  const auto& sym = trace.symbols();
  auto error = [&](std::size_t i, std::string msg) { out.push_back({Severity::Error, i, std::move(msg)}); };
  auto warning = [&](std::size_t i, std::string msg) { out.push_back({Severity::Warning, i, std::move(msg)}); };

  // first fork position of every forked thread
  std::map<ThreadId, std::size_t> fork_at;
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    if (l.op == OpKind::Fork && !fork_at.count(l.target())) fork_at[l.target()] = i;
  }

  std::map<ThreadId, ThreadId> parent;
  std::set<ThreadId> early_reported;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> depth;  // (thread, lock)

  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const auto& l = trace.label(i);
    const auto& tname = sym.name(l.thread);

    auto f = fork_at.find(l.thread);
    if (f != fork_at.end() && i < f->second && early_reported.insert(l.thread).second)
      error(i, "event of thread " + tname + " before it is forked at event " + std::to_string(f->second));

    switch (l.op) {
      case OpKind::Fork: {
        const auto& child = sym.name(l.target());
        if (l.target() == l.thread) {
          error(i, "thread " + tname + " forks itself");
        } else if (parent.count(l.target())) {
          error(i, "thread " + child + " forked more than once");
        } else {
          parent[l.target()] = l.thread;
        }
        break;
      }
      case OpKind::Join: {
        const auto& child = sym.name(l.target());
        if (l.target() == l.thread) {
          error(i, "thread " + tname + " joins itself");
        } else if (!parent.count(l.target())) {
          error(i, "join of never-forked thread " + child);
        } else if (parent[l.target()] != l.thread) {
          error(i, "thread " + child + " forked by " + sym.name(parent[l.target()]) + " but joined by " + tname);
        }
        break;
      }
      case OpKind::Acquire: {
        for (const auto& [key, d] : depth) {
          if (d > 0 && key.second == l.operand && key.first != l.thread.value) {
            error(i, "thread " + tname + " acquires lock " + sym.name(l.lock()) + " held by thread " +
                         sym.threads.name(key.first));
            break;
          }
        }
        ++depth[{l.thread.value, l.operand}];
        break;
      }
      case OpKind::Release: {
        auto& d = depth[{l.thread.value, l.operand}];
        if (d == 0)
          warning(i, "release of lock " + sym.name(l.lock()) + " by thread " + tname + " has no matching acquire");
        else
          --d;
        break;
      }
      default:
        break;
    }
  }
  for (const auto& [key, d] : depth)
    if (d > 0)
      warning(0, "thread " + sym.threads.name(key.first) + " ends holding lock " + sym.locks.name(key.second) +
                     " (" + std::to_string(d) + " unmatched acquire" + (d > 1 ? "s" : "") + ")");
  return out;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace ziptrace
