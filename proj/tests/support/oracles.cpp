#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace oracle {

bool ge(double signal, double denominator, double gamma) {
    return signal >= gamma * (1.0 - 1e-9) * denominator;
}

namespace {

double rx(const Instance& inst, std::size_t m, std::size_t k) { return inst.powers[m] * inst.gains.at(m, k); }

// Equal multisets of weights give equal sums.
double weight_of(const std::vector<double>& w) {
    std::vector<double> s(w);
    std::sort(s.begin(), s.end());
    double sum = 0.0;
    for (double x : s) sum += x;
    return sum;
}

}  // namespace

bool sud(const Instance& inst, const LinkSet& a) {
    for (std::size_t k : a) {
        double denom = inst.noise;
        for (std::size_t m : a) {
            if (m != k) denom += rx(inst, m, k);
        }
        if (!ge(rx(inst, k, k), denom, inst.thresholds[k])) return false;
    }
    return true;
}

bool pic(const Instance& inst, const LinkSet& a, std::size_t max_per_receiver) {
    for (std::size_t k : a) {
        std::vector<std::size_t> others;
        for (std::size_t m : a) {
            if (m != k) others.push_back(m);
        }
        bool ok = false;
        for (std::uint32_t c = 0; c < (1u << others.size()) && !ok; ++c) {
            if (static_cast<std::size_t>(std::popcount(c)) > max_per_receiver) continue;
            bool decodable = true;
            for (std::size_t i = 0; i < others.size() && decodable; ++i) {
                if (!(c >> i & 1)) continue;
                const std::size_t m = others[i];
                double denom = inst.noise;
                for (std::size_t n : a) {
                    if (n != m) denom += rx(inst, n, k);
                }
                decodable = ge(rx(inst, m, k), denom, inst.thresholds[m]);
            }
            if (!decodable) continue;
            double denom = inst.noise;
            for (std::size_t i = 0; i < others.size(); ++i) {
                if (!(c >> i & 1)) denom += rx(inst, others[i], k);
            }
            ok = ge(rx(inst, k, k), denom, inst.thresholds[k]);
        }
        if (!ok) return false;
    }
    return true;
}

std::vector<std::uint32_t> reachable(double base, const std::vector<Interferer>& list, std::size_t cap) {
    const std::size_t n = list.size();
    std::vector<bool> seen(std::size_t{1} << n, false);
    std::vector<std::uint32_t> out{0}, frontier{0};
    seen[0] = true;
    while (!frontier.empty()) {
        std::vector<std::uint32_t> next;
        for (std::uint32_t mask : frontier) {
            if (static_cast<std::size_t>(std::popcount(mask)) >= cap) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask >> i & 1) continue;
                double denom = base;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i && !(mask >> j & 1)) denom += list[j].power;
                }
                if (!ge(list[i].power, denom, list[i].threshold)) continue;
                const std::uint32_t grown = mask | (1u << i);
                if (!seen[grown]) {
                    seen[grown] = true;
                    out.push_back(grown);
                    next.push_back(grown);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::uint32_t sorted_greedy(double base, const std::vector<Interferer>& list) {
    std::vector<std::size_t> order(list.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return list[a].power / list[a].threshold > list[b].power / list[b].threshold;
    });
    std::uint32_t mask = 0;
    for (std::size_t i : order) {
        double denom = base;
        for (std::size_t j = 0; j < list.size(); ++j) {
            if (j != i && !(mask >> j & 1)) denom += list[j].power;
        }
        if (!ge(list[i].power, denom, list[i].threshold)) break;
        mask |= 1u << i;
    }
    return mask;
}

bool sic(const Instance& inst, const LinkSet& a, std::size_t cap) {
    for (std::size_t k : a) {
        std::vector<Interferer> list;
        for (std::size_t m : a) {
            if (m != k) list.push_back({rx(inst, m, k), inst.thresholds[m]});
        }
        const double own = rx(inst, k, k);
        bool ok = false;
        for (std::uint32_t mask : reachable(own + inst.noise, list, cap)) {
            double denom = inst.noise;
            for (std::size_t j = 0; j < list.size(); ++j) {
                if (!(mask >> j & 1)) denom += list[j].power;
            }
            if (ge(own, denom, inst.thresholds[k])) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

bool feasible(const Instance& inst, const linkact::SchemeConfig& cfg, const LinkSet& a) {
    switch (cfg.scheme) {
        case linkact::Scheme::sud: return sud(inst, a);
        case linkact::Scheme::slic: return pic(inst, a, 1);
        case linkact::Scheme::pic: return pic(inst, a);
        case linkact::Scheme::sic: return sic(inst, a, cfg.stage_cap);
    }
    return false;
}

double best_weight(const Instance& inst, const linkact::SchemeConfig& cfg) {
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << inst.k); ++mask) {
        LinkSet a;
        std::vector<double> w;
        for (std::size_t i = 0; i < inst.k; ++i) {
            if (mask >> i & 1) {
                a.push_back(i);
                w.push_back(inst.weights[i]);
            }
        }
        const double value = weight_of(w);
        if (value > best && feasible(inst, cfg, a)) best = value;
    }
    return best;
}

namespace {

struct RowState {
    const linkact::Row* row;
    double magnitude;  // |rhs| + sum |coef|, bounds the evaluation slack
};

class Completion {
   public:
    Completion(const linkact::IlpModel& model, std::uint32_t active) : value_(model.var_count(), -1) {
        for (std::size_t k = 0; k < model.k; ++k) value_[k] = active >> k & 1;
        for (std::size_t v : model.fixed_zero) {
            if (v >= model.k) value_[v] = 0;
            else if (value_[v] == 1) contradiction_ = true;
        }
        rows_of_.resize(model.var_count());
        for (const auto& r : model.rows) {
            double mag = std::fabs(r.rhs);
            for (const auto& t : r.terms) mag += std::fabs(t.coef);
            const std::size_t id = states_.size();
            states_.push_back({&r, mag});
            for (const auto& t : r.terms) rows_of_[t.var].push_back(id);
        }
    }

    bool run() {
        if (contradiction_) return false;
        for (std::size_t i = 0; i < states_.size(); ++i) {
            if (!possible(i)) return false;
        }
        // Free variables linked through a row are searched together; separate
        // groups (one per receiver in practice) are independent.
        std::vector<std::size_t> parent(value_.size());
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto root = [&](std::size_t v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (const auto& s : states_) {
            std::optional<std::size_t> first;
            for (const auto& t : s.row->terms) {
                if (value_[t.var] >= 0) continue;
                if (!first) first = t.var;
                else parent[root(t.var)] = root(*first);
            }
        }
        std::vector<std::vector<std::size_t>> groups(value_.size());
        for (std::size_t v = 0; v < value_.size(); ++v) {
            if (value_[v] < 0) groups[root(v)].push_back(v);
        }
        for (auto& g : groups) {
            if (g.empty()) continue;
            free_ = std::move(g);
            if (!search(0)) return false;
        }
        return true;
    }

   private:
    // Row can still hold: fixed activity plus the most negative completion.
    bool possible(std::size_t id) const {
        const auto& s = states_[id];
        double low = 0.0;
        bool complete = true;
        double used_mag = std::fabs(s.row->rhs);
        for (const auto& t : s.row->terms) {
            const int v = value_[t.var];
            if (v == 1) {
                low += t.coef;
                used_mag += std::fabs(t.coef);
            } else if (v < 0) {
                complete = false;
                if (t.coef < 0) low += t.coef;
            }
        }
        const double slack = 1e-9 * (complete ? used_mag : s.magnitude);
        return low <= s.row->rhs + slack;
    }

    bool search(std::size_t i) {
        if (i == free_.size()) return true;
        const std::size_t v = free_[i];
        for (int choice : {0, 1}) {
            value_[v] = choice;
            bool ok = true;
            for (std::size_t id : rows_of_[v]) {
                if (!possible(id)) {
                    ok = false;
                    break;
                }
            }
            if (ok && search(i + 1)) return true;
        }
        value_[v] = -1;
        return false;
    }

    std::vector<int> value_;
    std::vector<RowState> states_;
    std::vector<std::vector<std::size_t>> rows_of_;
    std::vector<std::size_t> free_;
    bool contradiction_ = false;
};

}  // namespace

bool completion_exists(const linkact::IlpModel& model, std::uint32_t active) {
    return Completion(model, active).run();
}

double ilp_optimum(const linkact::IlpModel& model) {
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << model.k); ++mask) {
        std::vector<double> w;
        for (std::size_t k = 0; k < model.k; ++k) {
            if (mask >> k & 1) w.push_back(model.objective[k]);
        }
        const double value = weight_of(w);
        if (value > best && completion_exists(model, mask)) best = value;
    }
    return best;
}

}  // namespace oracle
