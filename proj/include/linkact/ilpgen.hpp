#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "linkact/feasibility.hpp"
#include "linkact/instance.hpp"

namespace linkact {

/// Which linear model to emit. `sic_common` requires a common threshold.
enum class Formulation { sud, pic, slic, sic_common, sic_general };

std::string to_string(Formulation f);
/// Accepts sud, pic, slic, sic-common, sic-general (underscores also accepted).
Formulation parse_formulation(const std::string& s);

/// The scheme whose feasible sets the formulation describes.
SchemeConfig scheme_of(Formulation f, std::size_t stages);

struct BigM {
    /// M_k = sum_{m != k} p_m G_mk gamma_k + eta gamma_k - p_k G_kk.
    std::vector<double> own;
    /// cancel.at(m, k) = sum_{n != m} p_n G_nk gamma_m + eta gamma_m - p_m G_mk.
    SquareMatrix cancel;
};

/// Both formulas as written; negative values are kept.
BigM big_m(const Instance& inst);

struct Fixings {
    /// Links that cannot meet their threshold even alone.
    std::vector<std::size_t> links;
    /// (m, k) pairs: receiver k can never decode m, even with every other
    /// interferer silent.
    std::vector<std::pair<std::size_t, std::size_t>> cancellations;
};

Fixings preprocess(const Instance& inst);

enum class Sense { le, ge, eq };

struct Term {
    std::size_t var;
    double coef;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// Binary program, maximize objective . v subject to rows. Variables 0..K-1
/// are x_1..x_K; cancellation variables follow. Coefficients are the
/// denominator-cleared constraints divided by the noise power.
struct IlpModel {
    Formulation formulation = Formulation::sud;
    std::size_t k = 0;
    /// Cancellation stages of the general SIC model, 0 otherwise.
    std::size_t stages = 0;
    std::vector<std::string> names;
    std::vector<double> objective;
    std::vector<Row> rows;
    /// Variables bounded to 0 by preprocessing, ascending.
    std::vector<std::size_t> fixed_zero;
    BigM big_m;
    /// Common-SIC cancellation order: order[k] lists the other links, most
    /// cancellable first.
    std::vector<std::vector<std::size_t>> order;

    std::size_t var_count() const noexcept { return names.size(); }
    std::optional<std::size_t> find(const std::string& name) const;
    /// Index of y_mk (stage 0 for the single-stage models) or y^t_mk with t
    /// 1-based; throws std::out_of_range if the model has no such variable.
    std::size_t y(std::size_t m, std::size_t k, std::size_t t = 0) const;

    std::unordered_map<std::string, std::size_t> index;
};

/// `stages` is used by sic_general only; values above K-1 are clamped.
/// Throws ModelError when sic_common is asked for with differing thresholds.
IlpModel build_model(const Instance& inst, Formulation f, std::size_t stages = kUnlimitedStages,
                     bool apply_fixings = true);

/// CPLEX LP text. See docs/formats.md.
std::string write_lp(const IlpModel& model);

/// build_model + write in `format` ("lp" is the only one). Throws ModelError
/// for an unknown format.
std::string emit_model(const Instance& inst, Formulation f, std::size_t stages, const std::string& format,
                       bool apply_fixings = true);

using Assignment = std::vector<std::uint8_t>;

/// Lines `name value`. Blank lines and lines starting with '#' or '\' are
/// skipped; variables not listed are 0. Values must be within 1e-6 of 0 or 1.
/// Throws ParseError on unknown names, duplicates, or bad values.
Assignment parse_assignment(const std::string& text, const IlpModel& model);
std::string format_assignment(const IlpModel& model, const Assignment& a);

/// Row activity check with relative slack kRelativeTolerance. Fixed
/// variables set to 1 count as a violation of a pseudo-row "bound:<name>".
std::optional<std::string> first_violated_row(const IlpModel& model, const Assignment& a);
bool row_satisfied(const Row& row, const Assignment& a);

/// Active set and ordered cancellation lists encoded by `a`.
Solution solution_from_assignment(const Instance& inst, const IlpModel& model, const Assignment& a);
/// Inverse of solution_from_assignment. Throws SolutionError when the
/// solution needs a variable the model lacks (too many stages).
Assignment assignment_from_solution(const IlpModel& model, const Solution& sol);

}  // namespace linkact
