#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ziptrace {

// Error kinds surfaced through the C API as distinct status codes.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense index into one of the per-kind name tables. The tag keeps threads,
/// locks and variables from being mixed up even though all are integers.
template <class Tag>
struct Id {
  std::uint32_t value = 0;
  auto operator<=>(const Id&) const = default;
};

using ThreadId = Id<struct ThreadTag>;
using LockId = Id<struct LockTag>;
using VarId = Id<struct VarTag>;

enum class OpKind : std::uint8_t { Read, Write, Acquire, Release, Fork, Join };

std::string_view op_name(OpKind op);

/// ⟨t, o⟩ without a position. Two occurrences of the same operation by the
/// same thread are equal labels; event identity is the trace position.
struct EventLabel {
  ThreadId thread;
  OpKind op = OpKind::Read;
  std::uint32_t operand = 0;

  static EventLabel read(ThreadId t, VarId x) { return {t, OpKind::Read, x.value}; }
  static EventLabel write(ThreadId t, VarId x) { return {t, OpKind::Write, x.value}; }
  static EventLabel acquire(ThreadId t, LockId l) { return {t, OpKind::Acquire, l.value}; }
  static EventLabel release(ThreadId t, LockId l) { return {t, OpKind::Release, l.value}; }
  static EventLabel fork(ThreadId t, ThreadId u) { return {t, OpKind::Fork, u.value}; }
  static EventLabel join(ThreadId t, ThreadId u) { return {t, OpKind::Join, u.value}; }

  bool is_access() const { return op == OpKind::Read || op == OpKind::Write; }
  bool is_lock_op() const { return op == OpKind::Acquire || op == OpKind::Release; }
  bool is_thread_op() const { return op == OpKind::Fork || op == OpKind::Join; }

  VarId var() const { return VarId{operand}; }
  LockId lock() const { return LockId{operand}; }
  ThreadId target() const { return ThreadId{operand}; }

  auto operator<=>(const EventLabel&) const = default;
};

struct EventLabelHash {
  std::size_t operator()(const EventLabel& l) const noexcept {
    std::uint64_t k = (std::uint64_t{l.thread.value} << 35) ^ (std::uint64_t{l.operand} << 3) ^
                      static_cast<std::uint64_t>(l.op);
    return std::hash<std::uint64_t>{}(k * 0x9E3779B97F4A7C15ull);
  }
};

class NameTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t index) const { return names_.at(index); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const NameTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Name tables for the three identifier namespaces of a trace or grammar.
struct Symbols {
  NameTable threads;
  NameTable locks;
  NameTable vars;

  const std::string& name(ThreadId t) const { return threads.name(t.value); }
  const std::string& name(LockId l) const { return locks.name(l.value); }
  const std::string& name(VarId x) const { return vars.name(x.value); }

  bool operator==(const Symbols&) const = default;
};

bool is_identifier(std::string_view token);

/// Parses `<thread>|<op>(<operand>)`, interning names into `symbols`.
/// Throws ParseError tagged with `line`.
EventLabel parse_label(std::string_view text, Symbols& symbols, std::size_t line);

std::string format_label(const Symbols& symbols, const EventLabel& label);

/// Re-expresses `label` (interned in `from`) against the tables of `to`.
EventLabel translate_label(const EventLabel& label, const Symbols& from, Symbols& to);

std::string_view trim(std::string_view s);

}  // namespace ziptrace
