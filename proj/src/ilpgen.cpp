#include "linkact/ilpgen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "linkact/errors.hpp"

namespace linkact {

std::string to_string(Formulation f) {
    switch (f) {
        case Formulation::sud: return "sud";
        case Formulation::pic: return "pic";
        case Formulation::slic: return "slic";
        case Formulation::sic_common: return "sic-common";
        case Formulation::sic_general: return "sic-general";
    }
    return "?";
}

Formulation parse_formulation(const std::string& s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) {
        return c == '_' ? '-' : static_cast<char>(std::tolower(c));
    });
    if (lower == "sud") return Formulation::sud;
    if (lower == "pic") return Formulation::pic;
    if (lower == "slic") return Formulation::slic;
    if (lower == "sic-common") return Formulation::sic_common;
    if (lower == "sic-general" || lower == "sic") return Formulation::sic_general;
    throw std::invalid_argument("unknown formulation '" + s + "'");
}

SchemeConfig scheme_of(Formulation f, std::size_t stages) {
    switch (f) {
        case Formulation::sud: return SchemeConfig::sud();
        case Formulation::pic: return SchemeConfig::pic();
        case Formulation::slic: return SchemeConfig::slic();
        case Formulation::sic_common: return SchemeConfig::sic();
        case Formulation::sic_general: return SchemeConfig::sic(stages);
    }
    return SchemeConfig::sud();
}

BigM big_m(const Instance& inst) {
    if (!inst.has_thresholds()) throw std::invalid_argument("big_m: thresholds required");
    BigM out;
    out.own.resize(inst.k);
    out.cancel = SquareMatrix(inst.k);
    for (std::size_t k = 0; k < inst.k; ++k) {
        double others = 0.0;
        for (std::size_t m = 0; m < inst.k; ++m) {
            if (m != k) others += inst.received(m, k);
        }
        out.own[k] = others * inst.thresholds[k] + inst.noise * inst.thresholds[k] - inst.received(k, k);
        for (std::size_t m = 0; m < inst.k; ++m) {
            if (m == k) continue;
            // Every transmitter but m, the receiver's own link included.
            double rest = 0.0;
            for (std::size_t n = 0; n < inst.k; ++n) {
                if (n != m) rest += inst.received(n, k);
            }
            out.cancel.at(m, k) = rest * inst.thresholds[m] + inst.noise * inst.thresholds[m] - inst.received(m, k);
        }
    }
    return out;
}

Fixings preprocess(const Instance& inst) {
    if (!inst.has_thresholds()) throw std::invalid_argument("preprocess: thresholds required");
    Fixings f;
    for (std::size_t k = 0; k < inst.k; ++k) {
        if (!meets_threshold(inst.received(k, k), inst.noise, inst.thresholds[k])) f.links.push_back(k);
    }
    for (std::size_t m = 0; m < inst.k; ++m) {
        for (std::size_t k = 0; k < inst.k; ++k) {
            if (m == k) continue;
            if (!meets_threshold(inst.received(m, k), inst.received(k, k) + inst.noise, inst.thresholds[m])) {
                f.cancellations.emplace_back(m, k);
            }
        }
    }
    return f;
}

std::optional<std::size_t> IlpModel::find(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

std::size_t IlpModel::y(std::size_t m, std::size_t k, std::size_t t) const {
    if (formulation == Formulation::sud || m == k || m >= this->k || k >= this->k) {
        throw std::out_of_range("no such cancellation variable");
    }
    const std::size_t pair = k * (this->k - 1) + (m < k ? m : m - 1);
    if (formulation != Formulation::sic_general) {
        if (t > 1) throw std::out_of_range("single-stage model has no stage index");
        return this->k + pair;
    }
    if (t == 0 || t > stages) throw std::out_of_range("stage out of range");
    return this->k + pair * stages + (t - 1);
}

namespace {

class Builder {
   public:
    Builder(const Instance& inst, Formulation f, std::size_t stages) : inst_(inst) {
        model_.formulation = f;
        model_.k = inst.k;
        model_.stages = f == Formulation::sic_general ? std::min(stages, inst.k > 0 ? inst.k - 1 : 0) : 0;
        model_.big_m = big_m(inst);
    }

    IlpModel build(bool apply_fixings) {
        const std::size_t K = inst_.k;
        const Formulation f = model_.formulation;
        for (std::size_t k = 0; k < K; ++k) add_var(fmt::format("x_{}", k + 1), inst_.weights[k]);
        if (f != Formulation::sud) {
            const std::size_t T = f == Formulation::sic_general ? model_.stages : 1;
            for (std::size_t k = 0; k < K; ++k) {
                for (std::size_t m = 0; m < K; ++m) {
                    if (m == k) continue;
                    for (std::size_t t = 1; t <= T; ++t) {
                        add_var(f == Formulation::sic_general ? fmt::format("y_{}_{}_{}", m + 1, k + 1, t)
                                                              : fmt::format("y_{}_{}", m + 1, k + 1),
                                0.0);
                    }
                }
            }
        }

        switch (f) {
            case Formulation::sud:
                for (std::size_t k = 0; k < K; ++k) own_row(k);
                break;
            case Formulation::pic:
            case Formulation::slic:
                single_stage_rows(f == Formulation::slic);
                break;
            case Formulation::sic_common:
                common_sic_rows();
                break;
            case Formulation::sic_general:
                general_sic_rows();
                break;
        }

        if (apply_fixings) fix();
        return std::move(model_);
    }

   private:
    double scaled(std::size_t m, std::size_t k) const { return inst_.received(m, k) / inst_.noise; }
    double gamma(std::size_t k) const { return inst_.thresholds[k]; }

    void add_var(std::string name, double obj) {
        model_.index.emplace(name, model_.names.size());
        model_.names.push_back(std::move(name));
        model_.objective.push_back(obj);
    }

    void push(std::string name, std::vector<Term> terms, double rhs) {
        std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
        model_.rows.push_back(Row{std::move(name), std::move(terms), Sense::le, rhs});
    }

    // Right-hand side of a decoding row: the big-M constant p_mk + M_mk - gamma_m (p_kk + eta)
    // reduces to gamma_m times the interferers other than m and k. Summed directly
    // so that it is exactly 0 when there are none.
    double others(double g, std::size_t m, std::size_t k) const {
        double sum = 0.0;
        for (std::size_t n = 0; n < inst_.k; ++n) {
            if (n != m && n != k) sum += g * scaled(n, k);
        }
        return sum;
    }

    std::size_t T() const { return model_.formulation == Formulation::sic_general ? model_.stages : 1; }
    std::size_t yv(std::size_t m, std::size_t k, std::size_t t) const {
        return model_.formulation == Formulation::sic_general ? model_.y(m, k, t) : model_.y(m, k);
    }

    // p_kk + M_k (1 - x_k) >= gamma_k (sum_m p_m G_mk (x_m - sum_t y_mk^t) + eta)
    void own_row(std::size_t k) {
        const double g = gamma(k);
        const double M = model_.big_m.own[k] / inst_.noise;
        std::vector<Term> terms;
        double rhs = 0.0;
        for (std::size_t m = 0; m < inst_.k; ++m) {
            if (m == k) continue;
            terms.push_back({m, g * scaled(m, k)});
            rhs += g * scaled(m, k);
        }
        if (model_.formulation != Formulation::sud) {
            for (std::size_t m = 0; m < inst_.k; ++m) {
                if (m == k) continue;
                for (std::size_t t = 1; t <= T(); ++t) terms.push_back({yv(m, k, t), -g * scaled(m, k)});
            }
        }
        terms.push_back({k, M});
        push(fmt::format("sinr_{}", k + 1), std::move(terms), rhs);
    }

    // y_mk <= x_m and y_mk <= x_k, stage sums for the general model.
    void activity_rows() {
        const std::size_t K = inst_.k;
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t m = 0; m < K; ++m) {
                if (m == k) continue;
                std::vector<Term> terms;
                for (std::size_t t = 1; t <= T(); ++t) terms.push_back({yv(m, k, t), 1.0});
                terms.push_back({m, -1.0});
                push(fmt::format("act_{}_{}", m + 1, k + 1), std::move(terms), 0.0);
            }
        }
        if (model_.formulation == Formulation::sic_general) return;
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t m = 0; m < K; ++m) {
                if (m == k) continue;
                push(fmt::format("rx_{}_{}", m + 1, k + 1), {{yv(m, k, 1), 1.0}, {k, -1.0}}, 0.0);
            }
        }
    }

    void single_stage_rows(bool single_link) {
        const std::size_t K = inst_.k;
        activity_rows();
        for (std::size_t k = 0; k < K; ++k) own_row(k);
        // p_mk + M_mk (1 - y_mk) >= gamma_m (sum_{n != m} p_n G_nk x_n + eta)
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t m = 0; m < K; ++m) {
                if (m == k) continue;
                const double g = gamma(m);
                const double M = model_.big_m.cancel.at(m, k) / inst_.noise;
                std::vector<Term> terms;
                double rhs = 0.0;
                for (std::size_t n = 0; n < K; ++n) {
                    if (n == m) continue;
                    terms.push_back({n, g * scaled(n, k)});
                    rhs += g * scaled(n, k);
                }
                terms.push_back({yv(m, k, 1), M});
                push(fmt::format("dec_{}_{}", m + 1, k + 1), std::move(terms), rhs);
            }
        }
        if (!single_link) return;
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<Term> terms;
            for (std::size_t m = 0; m < K; ++m) {
                if (m != k) terms.push_back({yv(m, k, 1), 1.0});
            }
            push(fmt::format("one_{}", k + 1), std::move(terms), 1.0);
        }
    }

    void common_sic_rows() {
        const std::size_t K = inst_.k;
        for (std::size_t k = 1; k < K; ++k) {
            if (gamma(k) != gamma(0)) {
                throw ModelError("sic-common formulation needs one threshold for all links");
            }
        }
        // Uniform thresholds make the margin order the received-power order.
        model_.order.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            auto& seq = model_.order[k];
            for (std::size_t m = 0; m < K; ++m) {
                if (m != k) seq.push_back(m);
            }
            std::stable_sort(seq.begin(), seq.end(),
                             [&](std::size_t a, std::size_t b) { return inst_.received(a, k) > inst_.received(b, k); });
        }

        activity_rows();
        for (std::size_t k = 0; k < K; ++k) own_row(k);
        for (std::size_t k = 0; k < K; ++k) {
            const auto& seq = model_.order[k];
            for (std::size_t pos = 0; pos < seq.size(); ++pos) {
                const std::size_t m = seq[pos];
                const double g = gamma(m);
                const double M = model_.big_m.cancel.at(m, k) / inst_.noise;
                // Only links after m in the order can still interfere.
                std::vector<Term> terms;
                for (std::size_t after = pos + 1; after < seq.size(); ++after) {
                    terms.push_back({seq[after], g * scaled(seq[after], k)});
                }
                terms.push_back({yv(m, k, 1), M});
                push(fmt::format("dec_{}_{}", m + 1, k + 1), std::move(terms), others(g, m, k));
            }
            for (std::size_t pos = 0; pos + 1 < seq.size(); ++pos) {
                const std::size_t m = seq[pos];
                const double c = static_cast<double>(seq.size() - 1 - pos);
                std::vector<Term> terms;
                for (std::size_t after = pos + 1; after < seq.size(); ++after) {
                    terms.push_back({yv(seq[after], k, 1), 1.0});
                }
                terms.push_back({m, c});
                terms.push_back({yv(m, k, 1), -c});
                push(fmt::format("ord_{}_{}", m + 1, k + 1), std::move(terms), c);
            }
        }
    }

    void general_sic_rows() {
        const std::size_t K = inst_.k;
        const std::size_t S = model_.stages;
        if (S == 0) {
            for (std::size_t k = 0; k < K; ++k) own_row(k);
            return;
        }
        activity_rows();
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 1; t <= S; ++t) {
                std::vector<Term> terms;
                for (std::size_t m = 0; m < K; ++m) {
                    if (m != k) terms.push_back({yv(m, k, t), 1.0});
                }
                terms.push_back({k, -1.0});
                push(fmt::format("stage_{}_{}", k + 1, t), std::move(terms), 0.0);
            }
        }
        for (std::size_t k = 0; k < K; ++k) own_row(k);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t m = 0; m < K; ++m) {
                if (m == k) continue;
                const double g = gamma(m);
                const double M = model_.big_m.cancel.at(m, k) / inst_.noise;
                for (std::size_t t = 1; t <= S; ++t) {
                    std::vector<Term> terms;
                    for (std::size_t n = 0; n < K; ++n) {
                        if (n == m || n == k) continue;
                        terms.push_back({n, g * scaled(n, k)});
                        for (std::size_t s = 1; s < t; ++s) terms.push_back({yv(n, k, s), -g * scaled(n, k)});
                    }
                    terms.push_back({yv(m, k, t), M});
                    push(fmt::format("dec_{}_{}_{}", m + 1, k + 1, t), std::move(terms), others(g, m, k));
                }
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 2; t <= S; ++t) {
                std::vector<Term> terms;
                for (std::size_t m = 0; m < K; ++m) {
                    if (m == k) continue;
                    terms.push_back({yv(m, k, t), 1.0});
                    terms.push_back({yv(m, k, t - 1), -1.0});
                }
                push(fmt::format("block_{}_{}", k + 1, t), std::move(terms), 0.0);
            }
        }
    }

    void fix() {
        const Fixings f = preprocess(inst_);
        auto& fixed = model_.fixed_zero;
        fixed.insert(fixed.end(), f.links.begin(), f.links.end());
        if (model_.formulation != Formulation::sud) {
            for (auto [m, k] : f.cancellations) {
                for (std::size_t t = 1; t <= T(); ++t) fixed.push_back(yv(m, k, t));
            }
        }
        std::sort(fixed.begin(), fixed.end());
    }

    const Instance& inst_;
    IlpModel model_;
};

std::string number(double v) { return fmt::format("{:.17g}", v); }

void write_terms(std::ostringstream& out, const IlpModel& model, const std::vector<Term>& terms) {
    if (terms.empty()) {
        out << " 0 " << model.names.front();
        return;
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0 && i % 8 == 0) out << "\n   ";
        const double c = terms[i].coef;
        out << (c < 0 ? " - " : (i == 0 ? " " : " + ")) << number(std::fabs(c)) << ' ' << model.names[terms[i].var];
    }
}

}  // namespace

IlpModel build_model(const Instance& inst, Formulation f, std::size_t stages, bool apply_fixings) {
    validate_complete(inst);
    return Builder(inst, f, stages).build(apply_fixings);
}

std::string write_lp(const IlpModel& model) {
    std::ostringstream out;
    out << "\\ linkact " << to_string(model.formulation) << " K=" << model.k;
    if (model.formulation == Formulation::sic_general) out << " T=" << model.stages;
    out << "\n\\ coefficients scaled by 1/noise\n";
    out << "Maximize\n obj:";
    std::vector<Term> obj;
    for (std::size_t v = 0; v < model.var_count(); ++v) {
        if (model.objective[v] != 0.0) obj.push_back({v, model.objective[v]});
    }
    if (model.var_count() > 0) write_terms(out, model, obj);
    out << "\nSubject To\n";
    for (const Row& r : model.rows) {
        out << ' ' << r.name << ':';
        write_terms(out, model, r.terms);
        out << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << number(r.rhs) << '\n';
    }
    if (!model.fixed_zero.empty()) {
        out << "Bounds\n";
        for (std::size_t v : model.fixed_zero) out << ' ' << model.names[v] << " = 0\n";
    }
    if (model.var_count() > 0) {
        out << "Binaries\n";
        for (std::size_t v = 0; v < model.var_count(); ++v) {
            out << ' ' << model.names[v];
            if (v % 10 == 9 || v + 1 == model.var_count()) out << '\n';
        }
    }
    out << "End\n";
    return out.str();
}

std::string emit_model(const Instance& inst, Formulation f, std::size_t stages, const std::string& format,
                       bool apply_fixings) {
    if (format != "lp") throw ModelError("unknown model format '" + format + "'");
    return write_lp(build_model(inst, f, stages, apply_fixings));
}

Assignment parse_assignment(const std::string& text, const IlpModel& model) {
    Assignment a(model.var_count(), 0);
    std::vector<bool> seen(model.var_count(), false);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#' || line[first] == '\\') continue;
        std::istringstream fields(line);
        std::string name, value, extra;
        fields >> name >> value;
        const std::string where = fmt::format("line {}", lineno);
        if (value.empty()) throw ParseError(where, "expected 'name value'");
        if (fields >> extra) throw ParseError(where, "trailing text '" + extra + "'");
        auto idx = model.find(name);
        if (!idx) throw ParseError(where, "unknown variable '" + name + "'");
        if (seen[*idx]) throw ParseError(where, "duplicate variable '" + name + "'");
        seen[*idx] = true;
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("junk");
        } catch (const std::exception&) {
            throw ParseError(where, "value '" + value + "' is not a number");
        }
        if (std::fabs(v) <= 1e-6) {
            a[*idx] = 0;
        } else if (std::fabs(v - 1.0) <= 1e-6) {
            a[*idx] = 1;
        } else {
            throw ParseError(where, "value of '" + name + "' is not binary");
        }
    }
    return a;
}

std::string format_assignment(const IlpModel& model, const Assignment& a) {
    std::string out;
    for (std::size_t v = 0; v < model.var_count(); ++v) out += fmt::format("{} {}\n", model.names[v], int{a.at(v)});
    return out;
}

bool row_satisfied(const Row& row, const Assignment& a) {
    double activity = 0.0, magnitude = std::fabs(row.rhs);
    for (const Term& t : row.terms) {
        if (a[t.var]) {
            activity += t.coef;
            magnitude += std::fabs(t.coef);
        }
    }
    const double slack = kRelativeTolerance * magnitude;
    switch (row.sense) {
        case Sense::le: return activity <= row.rhs + slack;
        case Sense::ge: return activity >= row.rhs - slack;
        case Sense::eq: return std::fabs(activity - row.rhs) <= slack;
    }
    return false;
}

std::optional<std::string> first_violated_row(const IlpModel& model, const Assignment& a) {
    if (a.size() != model.var_count()) throw std::invalid_argument("assignment size does not match the model");
    for (std::size_t v : model.fixed_zero) {
        if (a[v]) return "bound:" + model.names[v];
    }
    for (const Row& r : model.rows) {
        if (!row_satisfied(r, a)) return r.name;
    }
    return std::nullopt;
}

Solution solution_from_assignment(const Instance& inst, const IlpModel& model, const Assignment& a) {
    if (a.size() != model.var_count()) throw std::invalid_argument("assignment size does not match the model");
    Solution sol;
    sol.cancels.assign(model.k, {});
    for (std::size_t k = 0; k < model.k; ++k) {
        if (a[k]) sol.active.push_back(k);
    }
    if (model.formulation != Formulation::sud) {
        for (std::size_t k = 0; k < model.k; ++k) {
            auto& list = sol.cancels[k];
            switch (model.formulation) {
                case Formulation::sic_general:
                    for (std::size_t t = 1; t <= model.stages; ++t) {
                        for (std::size_t m = 0; m < model.k; ++m) {
                            if (m != k && a[model.y(m, k, t)]) list.push_back(m);
                        }
                    }
                    break;
                case Formulation::sic_common:
                    for (std::size_t m : model.order[k]) {
                        if (a[model.y(m, k)]) list.push_back(m);
                    }
                    break;
                default:
                    for (std::size_t m = 0; m < model.k; ++m) {
                        if (m != k && a[model.y(m, k)]) list.push_back(m);
                    }
            }
        }
    }
    sol.weight = total_weight(inst, sol.active);
    return sol;
}

Assignment assignment_from_solution(const IlpModel& model, const Solution& sol) {
    Assignment a(model.var_count(), 0);
    for (std::size_t k : sol.active) {
        if (k >= model.k) throw SolutionError("active link out of range");
        a[k] = 1;
    }
    for (std::size_t k = 0; k < sol.cancels.size() && k < model.k; ++k) {
        const auto& list = sol.cancels[k];
        if (list.empty()) continue;
        if (model.formulation == Formulation::sud) throw SolutionError("single-user decoding has no cancellations");
        for (std::size_t pos = 0; pos < list.size(); ++pos) {
            const std::size_t m = list[pos];
            if (m >= model.k || m == k) throw SolutionError("cancelled link out of range");
            if (model.formulation == Formulation::sic_general) {
                if (pos + 1 > model.stages) {
                    throw SolutionError(fmt::format("receiver {} cancels more than {} links", k + 1, model.stages));
                }
                a[model.y(m, k, pos + 1)] = 1;
            } else {
                a[model.y(m, k)] = 1;
            }
        }
    }
    return a;
}

}  // namespace linkact
