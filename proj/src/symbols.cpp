#include "symbols.hpp"

#include <array>

namespace ziptrace {

namespace {

struct OpSpelling {
  std::string_view name;
  OpKind op;
};

constexpr std::array<OpSpelling, 6> kOps{{
    {"r", OpKind::Read},
    {"w", OpKind::Write},
    {"acq", OpKind::Acquire},
    {"rel", OpKind::Release},
    {"fork", OpKind::Fork},
    {"join", OpKind::Join},
}};

}  // namespace

std::string_view op_name(OpKind op) {
  for (const auto& s : kOps)
    if (s.op == op) return s.name;
  return "?";
}

std::uint32_t NameTable::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> NameTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

EventLabel parse_label(std::string_view text, Symbols& symbols, std::size_t line) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) throw ParseError(line, "expected '<thread>|<op>', got '" + std::string(text) + "'");
  std::string_view thread = text.substr(0, bar);
  std::string_view op = text.substr(bar + 1);
  if (!is_identifier(thread)) throw ParseError(line, "bad thread token '" + std::string(thread) + "'");

  auto open = op.find('(');
  if (open == std::string_view::npos || op.back() != ')')
    throw ParseError(line, "bad operation '" + std::string(op) + "'");
  std::string_view kind = op.substr(0, open);
  std::string_view operand = op.substr(open + 1, op.size() - open - 2);
  if (!is_identifier(operand)) throw ParseError(line, "bad operand token '" + std::string(operand) + "'");

  const OpSpelling* spelling = nullptr;
  for (const auto& s : kOps)
    if (s.name == kind) spelling = &s;
  if (spelling == nullptr) throw ParseError(line, "unknown operation '" + std::string(kind) + "'");

  ThreadId t{symbols.threads.intern(thread)};
  switch (spelling->op) {
    case OpKind::Read:
    case OpKind::Write:
      return {t, spelling->op, symbols.vars.intern(operand)};
    case OpKind::Acquire:
    case OpKind::Release:
      return {t, spelling->op, symbols.locks.intern(operand)};
    case OpKind::Fork:
    case OpKind::Join:
      return {t, spelling->op, symbols.threads.intern(operand)};
  }
  throw ParseError(line, "unreachable");
}

std::string format_label(const Symbols& symbols, const EventLabel& label) {
  std::string out = symbols.name(label.thread);
  out += '|';
  out += op_name(label.op);
  out += '(';
  switch (label.op) {
    case OpKind::Read:
    case OpKind::Write:
      out += symbols.name(label.var());
      break;
    case OpKind::Acquire:
    case OpKind::Release:
      out += symbols.name(label.lock());
      break;
    case OpKind::Fork:
    case OpKind::Join:
      out += symbols.name(label.target());
      break;
  }
  out += ')';
  return out;
}

EventLabel translate_label(const EventLabel& label, const Symbols& from, Symbols& to) {
  EventLabel out = label;
  out.thread = ThreadId{to.threads.intern(from.name(label.thread))};
  switch (label.op) {
    case OpKind::Read:
    case OpKind::Write:
      out.operand = to.vars.intern(from.name(label.var()));
      break;
    case OpKind::Acquire:
    case OpKind::Release:
      out.operand = to.locks.intern(from.name(label.lock()));
      break;
    case OpKind::Fork:
    case OpKind::Join:
      out.operand = to.threads.intern(from.name(label.target()));
      break;
  }
  return out;
}

}  // namespace ziptrace
