#include "linkact/feasibility.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>

#include "linkact/errors.hpp"

namespace linkact {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::sud: return "sud";
        case Scheme::slic: return "slic";
        case Scheme::pic: return "pic";
        case Scheme::sic: return "sic";
    }
    return "?";
}

Scheme parse_scheme(const std::string& s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "sud") return Scheme::sud;
    if (lower == "slic") return Scheme::slic;
    if (lower == "pic") return Scheme::pic;
    if (lower == "sic") return Scheme::sic;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

namespace {

void require_thresholds(const Instance& inst) {
    if (!inst.has_thresholds()) throw std::invalid_argument("instance has no SINR thresholds assigned");
}

// Sum of received powers at receiver k over `active`, skipping up to two
// indices. Always summed in the order of `active` so every caller sees the
// same rounding.
double received_sum(const Instance& inst, const LinkSet& active, std::size_t k, std::size_t skip_a,
                    std::size_t skip_b) {
    double sum = 0.0;
    for (std::size_t m : active) {
        if (m != skip_a && m != skip_b) sum += inst.received(m, k);
    }
    return sum;
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

bool own_sinr_ok(const Instance& inst, const LinkSet& active, std::size_t k,
                 const std::vector<std::size_t>& cancelled) {
    double interference = 0.0;
    for (std::size_t m : active) {
        if (m == k || std::find(cancelled.begin(), cancelled.end(), m) != cancelled.end()) continue;
        interference += inst.received(m, k);
    }
    return meets_threshold(inst.received(k, k), interference + inst.noise, inst.thresholds[k]);
}

}  // namespace

MarginTable margins(const Instance& inst) {
    require_thresholds(inst);
    MarginTable t;
    t.own.resize(inst.k);
    t.cancel = SquareMatrix(inst.k);
    for (std::size_t k = 0; k < inst.k; ++k) {
        t.own[k] = inst.received(k, k) / inst.thresholds[k];
        for (std::size_t m = 0; m < inst.k; ++m) {
            if (m != k) t.cancel.at(m, k) = inst.received(m, k) / inst.thresholds[m];
        }
    }
    return t;
}

bool check_sud(const Instance& inst, const LinkSet& active) {
    require_thresholds(inst);
    for (std::size_t k : active) {
        const double interference = received_sum(inst, active, k, k, kNone);
        if (!meets_threshold(inst.received(k, k), interference + inst.noise, inst.thresholds[k])) return false;
    }
    return true;
}

CancelLists pic_cancel_sets(const Instance& inst, const LinkSet& active) {
    require_thresholds(inst);
    CancelLists sets(inst.k);
    for (std::size_t k : active) {
        const double total = received_sum(inst, active, k, kNone, kNone);
        for (std::size_t m : active) {
            if (m == k) continue;
            const double p = inst.received(m, k);
            if (meets_threshold(p, (total - p) + inst.noise, inst.thresholds[m])) sets[k].push_back(m);
        }
    }
    return sets;
}

Verdict check_pic(const Instance& inst, const LinkSet& active) {
    Verdict v{true, pic_cancel_sets(inst, active)};
    for (std::size_t k : active) {
        if (!own_sinr_ok(inst, active, k, v.cancels[k])) {
            v.feasible = false;
            break;
        }
    }
    return v;
}

Verdict check_slic(const Instance& inst, const LinkSet& active) {
    Verdict v{true, pic_cancel_sets(inst, active)};
    for (std::size_t k : active) {
        auto& list = v.cancels[k];
        if (list.size() > 1) {
            std::size_t best = list.front();
            for (std::size_t m : list) {
                if (inst.received(m, k) > inst.received(best, k)) best = m;
            }
            list.assign(1, best);
        }
        if (v.feasible && !own_sinr_ok(inst, active, k, list)) v.feasible = false;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Successive cancellation.

namespace {

// Undecoded interference with `cancelled` removed, excluding position `skip`.
double undecoded_sum(std::span<const Interferer> in, const std::vector<bool>& cancelled, std::size_t skip) {
    double sum = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (!cancelled[i] && i != skip) sum += in[i].power;
    }
    return sum;
}

Saturation saturate_uncapped(double base, std::span<const Interferer> in) {
    Saturation s;
    std::vector<bool> cancelled(in.size(), false);
    for (;;) {
        const double undecoded = undecoded_sum(in, cancelled, kNone);
        std::size_t pick = kNone;
        double pick_margin = 0.0;
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (cancelled[i]) continue;
            if (!meets_threshold(in[i].power, (undecoded - in[i].power) + base, in[i].threshold)) continue;
            const double margin = in[i].power / in[i].threshold;
            if (pick == kNone || margin > pick_margin) {
                pick = i;
                pick_margin = margin;
            }
        }
        if (pick == kNone) break;
        cancelled[pick] = true;
        s.order.push_back(pick);
    }
    s.residual = undecoded_sum(in, cancelled, kNone);
    return s;
}

// Exhaustive search over cancellation sequences of length <= cap, restricted
// to members of the uncapped fixpoint (nothing else is ever decodable).
// States are cancelled subsets; a subset's future does not depend on the
// order that reached it, so each is expanded once.
class CappedSearch {
   public:
    CappedSearch(double base, std::span<const Interferer> in, const std::vector<std::size_t>& candidates,
                 std::size_t cap)
        : base_(base), in_(in), cand_(candidates), cap_(cap), cancelled_(in.size(), false) {
        if (cand_.size() > 64) {
            throw std::length_error("capped successive cancellation supports at most 64 decodable interferers");
        }
        sorted_powers_.reserve(cand_.size());
        for (std::size_t c : cand_) sorted_powers_.push_back(in_[c].power);
        std::sort(sorted_powers_.begin(), sorted_powers_.end(), std::greater<>());
        double top = 0.0;
        for (std::size_t i = 0; i < cap_ && i < sorted_powers_.size(); ++i) top += sorted_powers_[i];
        floor_ = undecoded_sum(in_, cancelled_, kNone) - top;
    }

    Saturation run() {
        dfs(0);
        Saturation s;
        s.order = best_order_;
        std::vector<bool> mask(in_.size(), false);
        for (std::size_t i : best_order_) mask[i] = true;
        s.residual = undecoded_sum(in_, mask, kNone);
        return s;
    }

   private:
    void dfs(std::uint64_t mask) {
        if (done_) return;
        const double residual = undecoded_sum(in_, cancelled_, kNone);
        if (residual < best_residual_) {
            best_residual_ = residual;
            best_order_ = sequence_;
            // No cap-length sequence can remove more than the `cap` strongest.
            if (best_residual_ <= floor_) {
                done_ = true;
                return;
            }
        }
        const std::size_t depth = sequence_.size();
        if (depth == cap_) return;

        // Bound: at most cap - depth more of the strongest remaining candidates.
        double reachable = 0.0;
        std::size_t budget = cap_ - depth;
        std::vector<double> remaining;
        for (std::size_t j = 0; j < cand_.size(); ++j) {
            if (!(mask >> j & 1)) remaining.push_back(in_[cand_[j]].power);
        }
        std::sort(remaining.begin(), remaining.end(), std::greater<>());
        for (std::size_t i = 0; i < budget && i < remaining.size(); ++i) reachable += remaining[i];
        if (residual - reachable >= best_residual_) return;

        for (std::size_t j = 0; j < cand_.size(); ++j) {
            if (mask >> j & 1) continue;
            const std::size_t i = cand_[j];
            if (!meets_threshold(in_[i].power, (residual - in_[i].power) + base_, in_[i].threshold)) {
                continue;
            }
            const std::uint64_t next = mask | (std::uint64_t{1} << j);
            if (!visited_.insert(next).second) continue;
            cancelled_[i] = true;
            sequence_.push_back(i);
            dfs(next);
            sequence_.pop_back();
            cancelled_[i] = false;
            if (done_) return;
        }
    }

    double base_;
    std::span<const Interferer> in_;
    const std::vector<std::size_t>& cand_;
    std::size_t cap_;
    std::vector<bool> cancelled_;
    std::vector<double> sorted_powers_;
    double floor_ = 0.0;
    std::vector<std::size_t> sequence_;
    std::vector<std::size_t> best_order_;
    double best_residual_ = std::numeric_limits<double>::infinity();
    std::unordered_set<std::uint64_t> visited_;
    bool done_ = false;
};

}  // namespace

Saturation sic_saturate_receiver(double base, std::span<const Interferer> interferers, std::size_t cap) {
    Saturation full = saturate_uncapped(base, interferers);
    if (full.order.size() <= cap) return full;

    const bool uniform = std::all_of(interferers.begin(), interferers.end(),
                                     [&](const Interferer& x) { return x.threshold == interferers[0].threshold; });
    if (uniform) {
        // Equal thresholds: the margin order is the power order, and every
        // reachable set is contained in the fixpoint, so its prefix is optimal.
        Saturation s;
        s.order.assign(full.order.begin(), full.order.begin() + static_cast<std::ptrdiff_t>(cap));
        std::vector<bool> mask(interferers.size(), false);
        for (std::size_t i : s.order) mask[i] = true;
        s.residual = undecoded_sum(interferers, mask, kNone);
        return s;
    }
    return CappedSearch(base, interferers, full.order, cap).run();
}

Verdict check_sic(const Instance& inst, const LinkSet& active, const SchemeConfig& cfg) {
    require_thresholds(inst);
    Verdict v{true, CancelLists(inst.k)};
    std::vector<Interferer> in;
    std::vector<std::size_t> index;
    for (std::size_t k : active) {
        in.clear();
        index.clear();
        for (std::size_t m : active) {
            if (m == k) continue;
            in.push_back({inst.received(m, k), inst.thresholds[m]});
            index.push_back(m);
        }
        const double own = inst.received(k, k);
        const Saturation s = sic_saturate_receiver(own + inst.noise, in, cfg.stage_cap);
        for (std::size_t pos : s.order) v.cancels[k].push_back(index[pos]);
        if (!meets_threshold(own, s.residual + inst.noise, inst.thresholds[k])) {
            v.feasible = false;
            return v;
        }
    }
    return v;
}

Verdict check(const Instance& inst, const SchemeConfig& cfg, const LinkSet& active) {
    switch (cfg.scheme) {
        case Scheme::sud: return {check_sud(inst, active), CancelLists(inst.k)};
        case Scheme::slic: return check_slic(inst, active);
        case Scheme::pic: return check_pic(inst, active);
        case Scheme::sic: return check_sic(inst, active, cfg);
    }
    throw std::logic_error("unreachable scheme");
}

double total_weight(const Instance& inst, const LinkSet& active) {
    // Summed in ascending value order: sets with equal weight multisets get
    // bit-identical totals regardless of which links carry them.
    std::vector<double> w;
    w.reserve(active.size());
    for (std::size_t k : active) w.push_back(inst.weights[k]);
    std::sort(w.begin(), w.end());
    double sum = 0.0;
    for (double x : w) sum += x;
    return sum;
}

// ---------------------------------------------------------------------------
// Explicit-solution verification.

namespace {

void check_structure(const Instance& inst, const Solution& sol) {
    for (std::size_t i = 0; i < sol.active.size(); ++i) {
        if (sol.active[i] >= inst.k) throw SolutionError(fmt::format("active link {} out of range", sol.active[i]));
        if (i > 0 && sol.active[i] <= sol.active[i - 1]) {
            throw SolutionError("active set must be sorted and free of duplicates");
        }
    }
    if (sol.cancels.size() != inst.k && !sol.cancels.empty()) {
        throw SolutionError(fmt::format("cancellation lists: expected {} receivers, got {}", inst.k, sol.cancels.size()));
    }
    auto is_active = [&](std::size_t m) { return std::binary_search(sol.active.begin(), sol.active.end(), m); };
    for (std::size_t k = 0; k < sol.cancels.size(); ++k) {
        const auto& list = sol.cancels[k];
        if (list.empty()) continue;
        if (!is_active(k)) throw SolutionError(fmt::format("inactive receiver {} cancels", k));
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::size_t m = list[i];
            if (m >= inst.k) throw SolutionError(fmt::format("receiver {}: cancelled link {} out of range", k, m));
            if (m == k) throw SolutionError(fmt::format("receiver {} cancels itself", k));
            if (!is_active(m)) throw SolutionError(fmt::format("receiver {} cancels inactive link {}", k, m));
            if (std::find(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(i), m) !=
                list.begin() + static_cast<std::ptrdiff_t>(i)) {
                throw SolutionError(fmt::format("receiver {} cancels link {} twice", k, m));
            }
        }
    }
    const double expected = total_weight(inst, sol.active);
    if (std::abs(sol.weight - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw SolutionError(fmt::format("weight {} does not match active set weight {}", sol.weight, expected));
    }
}

}  // namespace

VerifyResult verify_solution(const Instance& inst, const SchemeConfig& cfg, const Solution& sol) {
    require_thresholds(inst);
    if (!inst.has_weights()) throw std::invalid_argument("instance has no weights assigned");
    check_structure(inst, sol);

    static const std::vector<std::size_t> kEmpty;
    for (std::size_t k : sol.active) {
        const auto& list = sol.cancels.empty() ? kEmpty : sol.cancels[k];
        const std::size_t limit = cfg.scheme == Scheme::sud    ? 0
                                  : cfg.scheme == Scheme::slic ? 1
                                  : cfg.scheme == Scheme::sic  ? cfg.stage_cap
                                                               : kUnlimitedStages;
        if (list.size() > limit) {
            return {false, Violation{k, list[std::min(limit, list.size() - 1)], limit + 1,
                                     fmt::format("{} cancellations exceed the limit of {}", list.size(), limit)}};
        }
        for (std::size_t stage = 0; stage < list.size(); ++stage) {
            const std::size_t m = list[stage];
            double interference = 0.0;
            for (std::size_t n : sol.active) {
                if (n == m) continue;
                if (cfg.scheme == Scheme::sic &&
                    std::find(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(stage), n) !=
                        list.begin() + static_cast<std::ptrdiff_t>(stage)) {
                    continue;
                }
                interference += inst.received(n, k);
            }
            if (!meets_threshold(inst.received(m, k), interference + inst.noise, inst.thresholds[m])) {
                return {false, Violation{k, m, stage + 1, "cancellation condition fails"}};
            }
        }
        if (!own_sinr_ok(inst, sol.active, k, list)) {
            return {false, Violation{k, std::nullopt, 0, "own SINR below threshold"}};
        }
    }
    return {true, std::nullopt};
}

}  // namespace linkact
