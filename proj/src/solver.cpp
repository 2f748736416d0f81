#include "linkact/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace linkact {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::time_limit: return "time_limit";
        case SolveStatus::infeasible_empty_only: return "infeasible_empty_only";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

class BranchAndBound {
   public:
    BranchAndBound(const Instance& inst, const SchemeConfig& cfg, Budget budget)
        : inst_(inst), cfg_(cfg), start_(Clock::now()),
          deadline_(start_ + std::chrono::duration_cast<Clock::duration>(budget)) {}

    SolveReport run() {
        std::vector<std::size_t> order(inst_.k);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (inst_.weights[a] != inst_.weights[b]) return inst_.weights[a] > inst_.weights[b];
            const double sa = inst_.received(a, a), sb = inst_.received(b, b);
            if (sa != sb) return sa > sb;
            return a < b;
        });

        std::vector<std::size_t> roots;
        for (std::size_t j : order) {
            if (feasible_with(j)) roots.push_back(j);
        }
        expand(roots, 0.0);

        SolveReport report;
        report.nodes_explored = nodes_;
        report.solution.active = best_;
        report.solution.cancels = check(inst_, cfg_, best_).cancels;
        report.solution.weight = total_weight(inst_, best_);
        report.status = timed_out_        ? SolveStatus::time_limit
                        : best_.empty()   ? SolveStatus::infeasible_empty_only
                                          : SolveStatus::optimal;
        report.wall_time = Clock::now() - start_;
        return report;
    }

   private:
    // Feasibility of the current set plus j.
    bool feasible_with(std::size_t j) {
        probe_ = in_;
        probe_.insert(std::upper_bound(probe_.begin(), probe_.end(), j), j);
        return check(inst_, cfg_, probe_).feasible;
    }

    // `candidates` are, in branching order, the undecided links each feasible
    // together with in_.
    void expand(const std::vector<std::size_t>& candidates, double weight) {
        ++nodes_;
        if ((nodes_ & 63) == 0 && Clock::now() >= deadline_) timed_out_ = true;
        if (timed_out_) return;

        if (!in_.empty()) {
            const double exact = total_weight(inst_, in_);
            if (exact > best_weight_) {
                best_weight_ = exact;
                best_ = in_;
            }
        }

        std::vector<double> suffix(candidates.size() + 1, 0.0);
        for (std::size_t i = candidates.size(); i-- > 0;) suffix[i] = suffix[i + 1] + inst_.weights[candidates[i]];

        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (weight + suffix[i] <= best_weight_) break;
            const std::size_t j = candidates[i];
            in_.insert(std::upper_bound(in_.begin(), in_.end(), j), j);
            next.clear();
            for (std::size_t c = i + 1; c < candidates.size(); ++c) {
                if (feasible_with(candidates[c])) next.push_back(candidates[c]);
            }
            expand(next, weight + inst_.weights[j]);
            in_.erase(std::find(in_.begin(), in_.end(), j));
            if (timed_out_) return;
        }
    }

    const Instance& inst_;
    SchemeConfig cfg_;
    Clock::time_point start_;
    Clock::time_point deadline_;
    LinkSet in_;
    LinkSet probe_;
    LinkSet best_;
    double best_weight_ = 0.0;
    std::uint64_t nodes_ = 0;
    bool timed_out_ = false;
};

}  // namespace

SolveReport solve_exact(const Instance& inst, const SchemeConfig& cfg, Budget budget) {
    validate_complete(inst);
    if (!(budget.count() > 0.0)) throw std::invalid_argument("solve_exact: budget must be positive");
    SolveReport report = BranchAndBound(inst, cfg, budget).run();
    if (!verify_solution(inst, cfg, report.solution).valid) {
        throw std::logic_error("solve_exact produced a solution that fails verification");
    }
    return report;
}

Solution brute_force(const Instance& inst, const SchemeConfig& cfg) {
    validate_complete(inst);
    if (inst.k > kBruteForceMaxLinks) {
        throw std::length_error(fmt::format("brute_force: K = {} exceeds the limit of {}", inst.k, kBruteForceMaxLinks));
    }
    LinkSet best;
    double best_weight = 0.0;
    LinkSet set;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << inst.k); ++mask) {
        set.clear();
        for (std::size_t i = 0; i < inst.k; ++i) {
            if (mask >> i & 1) set.push_back(i);
        }
        const double w = total_weight(inst, set);
        if (w < best_weight) continue;
        if (w == best_weight && !best.empty() && !(set < best)) continue;
        if (!check(inst, cfg, set).feasible) continue;
        best = set;
        best_weight = w;
    }
    Solution sol;
    sol.active = best;
    sol.cancels = check(inst, cfg, best).cancels;
    sol.weight = total_weight(inst, best);
    return sol;
}

double default_reduction_epsilon(const Instance& inst) {
    if (!inst.has_thresholds() || inst.k == 0) throw std::invalid_argument("instance has no thresholds");
    return 1e-3 * *std::min_element(inst.thresholds.begin(), inst.thresholds.end());
}

Instance reduce_sud_to_pic(const Instance& inst, double epsilon) {
    validate(inst);
    if (!inst.has_thresholds()) throw std::invalid_argument("reduce_sud_to_pic: thresholds required");
    if (inst.k > 0) {
        const double min_gamma = *std::min_element(inst.thresholds.begin(), inst.thresholds.end());
        if (!(epsilon > 0.0 && epsilon < min_gamma)) {
            throw std::domain_error(fmt::format("reduce_sud_to_pic: epsilon {} outside (0, {})", epsilon, min_gamma));
        }
    }
    Instance out = inst;
    for (std::size_t k = 0; k < inst.k; ++k) {
        double power = inst.powers[k];
        for (std::size_t m = 0; m < inst.k; ++m) {
            if (m == k) continue;
            // Received powers at other receivers are preserved below, so the
            // original p_m G_mk is the current one as well.
            const double drown = (inst.received(m, k) / (inst.thresholds[m] - epsilon) - inst.noise) / inst.gains.at(k, k);
            power = std::max(power, drown);
        }
        if (power == inst.powers[k]) continue;
        const double scale = inst.powers[k] / power;
        out.powers[k] = power;
        for (std::size_t m = 0; m < inst.k; ++m) {
            if (m != k) out.gains.at(k, m) = inst.gains.at(k, m) * scale;
        }
        out.thresholds[k] = inst.thresholds[k] / scale;
    }
    return out;
}

}  // namespace linkact
