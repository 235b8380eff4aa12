#pragma once

#include "slp.hpp"
#include "trace.hpp"

namespace ziptrace {

/// Online Sequitur over event labels. The start rule gets id 0; other rules
/// are numbered in order of first appearance in a left-to-right walk.
/// The result expands to `trace`, has no repeated digram and references
/// every non-start rule at least twice.
Slp sequitur_compress(const Trace& trace);

/// Repeated non-overlapping digrams across all rule bodies, as
/// "@rule:pos" pairs; empty when digram uniqueness holds.
std::vector<std::string> digram_violations(const Slp& slp);

/// Non-start rules referenced fewer than two times.
std::vector<std::uint32_t> utility_violations(const Slp& slp);

}  // namespace ziptrace
