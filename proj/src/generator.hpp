#pragma once

#include <cstdint>
#include <string>

#include "trace.hpp"

namespace ziptrace {

enum class Pattern { IncLoop, LockLoop, Random };

Pattern pattern_from_name(const std::string& name);  // throws UsageError
std::string pattern_name(Pattern p);

struct GenSpec {
  Pattern pattern = Pattern::IncLoop;
  std::uint64_t iterations = 10;  // loop rounds, or event budget for random
  std::uint32_t threads = 2;      // workers for the loops, max threads for random
  std::uint32_t locks = 1;
  std::uint32_t vars = 2;
  std::uint64_t seed = 1;
};

/// inc-loop: main forks the workers, then N rounds of every worker doing
/// r(y) w(y), then joins them all. lock-loop wraps each worker's pair in
/// acq(l)/rel(l). random: a seeded well-formed trace of at most
/// `iterations` events (fork before use, per-thread lock nesting, no lock
/// taken while another thread holds it, joins by the parent after the
/// child is done and holds nothing, reentrancy at most 3).
Trace gen_trace(const GenSpec& spec);

}  // namespace ziptrace
