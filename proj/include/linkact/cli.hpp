#pragma once

#include <iosfwd>
#include <string>

#include "linkact/feasibility.hpp"
#include "linkact/solver.hpp"

namespace linkact {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int invalid = 3;
inline constexpr int io = 4;
inline constexpr int time_limit = 5;
}  // namespace exit_code

/// Solution document with 1-based link ids. `report` may be null, in which
/// case status and node count are omitted.
std::string dump_solution(const Solution& sol, const SchemeConfig& cfg, const SolveReport* report = nullptr);

struct SolutionDoc {
    Solution solution;
    SchemeConfig config;
};

/// Throws ParseError. Link ids are converted back to 0-based.
SolutionDoc parse_solution(const std::string& text, std::size_t k);

/// Runs one subcommand. Normal output goes to `out`, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace linkact
