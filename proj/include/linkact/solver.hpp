#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "linkact/feasibility.hpp"
#include "linkact/instance.hpp"

namespace linkact {

enum class SolveStatus { optimal, time_limit, infeasible_empty_only };

std::string to_string(SolveStatus s);

struct SolveReport {
    Solution solution;
    std::uint64_t nodes_explored = 0;
    std::chrono::duration<double> wall_time{};
    SolveStatus status = SolveStatus::optimal;
};

using Budget = std::chrono::duration<double>;

inline constexpr Budget kDefaultBudget = std::chrono::seconds(120);

/// Maximum-weight feasible activation set under `cfg`.
///
/// Depth-first branch-and-bound over links in the order (weight desc, SNR
/// desc, index asc). Feasibility is hereditary, so a node keeps only the
/// undecided links that are feasible together with the current set; the
/// node is pruned when the current weight plus those links' weights cannot
/// beat the incumbent. On budget exhaustion the best set found so far is
/// returned with status time_limit.
SolveReport solve_exact(const Instance& inst, const SchemeConfig& cfg, Budget budget = kDefaultBudget);

inline constexpr std::size_t kBruteForceMaxLinks = 20;

/// Enumerates all 2^K subsets. Ties go to the lexicographically smallest set.
/// Throws std::length_error above kBruteForceMaxLinks.
Solution brute_force(const Instance& inst, const SchemeConfig& cfg);

/// Transforms an instance so that no cancellation condition can hold while
/// the single-user-decoding feasible sets stay the same. Each link's power is
/// raised until it drowns every interferer below (gamma_m - epsilon), its
/// outgoing cross gains are scaled down by the same factor, and its threshold
/// is scaled up by it. Throws std::domain_error unless 0 < epsilon < min gamma.
Instance reduce_sud_to_pic(const Instance& inst, double epsilon);

/// 1e-3 times the smallest threshold.
double default_reduction_epsilon(const Instance& inst);

}  // namespace linkact
