#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkact/instance.hpp"

namespace linkact {

/// Every SINR or cancellation condition `ratio >= gamma` is evaluated as
/// `ratio >= gamma * (1 - kRelativeTolerance)`.
inline constexpr double kRelativeTolerance = 1e-9;

/// signal / interference_plus_noise >= threshold, under kRelativeTolerance.
/// `interference_plus_noise` is positive for every call made by this library.
inline bool meets_threshold(double signal, double interference_plus_noise, double threshold) {
    return signal >= threshold * (1.0 - kRelativeTolerance) * interference_plus_noise;
}

/// Sorted, duplicate-free, 0-based link indices.
using LinkSet = std::vector<std::size_t>;

/// Per-receiver ordered cancellation lists, indexed by receiver. Entry k is
/// empty for receivers that cancel nothing (always for inactive links).
using CancelLists = std::vector<std::vector<std::size_t>>;

enum class Scheme { sud, slic, pic, sic };

inline constexpr std::size_t kUnlimitedStages = std::numeric_limits<std::size_t>::max();

struct SchemeConfig {
    Scheme scheme = Scheme::sud;
    /// Maximum cancellations per receiver. Anything >= K-1 is unrestricted.
    std::size_t stage_cap = 0;

    static SchemeConfig sud() { return {Scheme::sud, 0}; }
    static SchemeConfig slic() { return {Scheme::slic, 1}; }
    static SchemeConfig pic() { return {Scheme::pic, kUnlimitedStages}; }
    static SchemeConfig sic(std::size_t cap = kUnlimitedStages) { return {Scheme::sic, cap}; }

    bool operator==(const SchemeConfig&) const = default;
};

std::string to_string(Scheme s);
/// Accepts sud, slic, pic, sic (case-insensitive).
Scheme parse_scheme(const std::string& s);

struct MarginTable {
    /// u_k = p_k G_kk / gamma_k: tolerable interference plus noise at receiver k.
    std::vector<double> own;
    /// cancel.at(m, k) = p_m G_mk / gamma_m: tolerable interference plus noise
    /// (own signal included) for receiver k to decode link m. Diagonal unused.
    SquareMatrix cancel;
};

MarginTable margins(const Instance& inst);

struct Verdict {
    bool feasible = false;
    CancelLists cancels;
};

bool check_sud(const Instance& inst, const LinkSet& active);

/// Single-stage decodable sets: for each active k, every other active m whose
/// signal clears gamma_m against all other active signals (k's own included).
CancelLists pic_cancel_sets(const Instance& inst, const LinkSet& active);

Verdict check_pic(const Instance& inst, const LinkSet& active);
/// PIC restricted to one cancellation per receiver: the decodable interferer
/// with the largest received power, ties to the lowest index.
Verdict check_slic(const Instance& inst, const LinkSet& active);

struct Interferer {
    double power;      // received power at this receiver, watts
    double threshold;  // SINR threshold of the interfering link, linear
};

struct Saturation {
    /// Positions into the interferer list, in cancellation order.
    std::vector<std::size_t> order;
    /// Summed power of the interferers left undecoded.
    double residual = 0.0;
};

/// Successive cancellation at one receiver. `base` is everything in the
/// denominator besides the other interferers: own received signal, noise, and
/// any fixed uncancellable interference.
///
/// With `cap` >= number of interferers the decodable interferers are cancelled
/// to a fixpoint; the resulting set does not depend on the choice made at each
/// step, and the reported order takes the largest margin first (ties to the
/// earlier position). With a tighter cap the sequence of at most `cap`
/// cancellations leaving the least residual is returned: the margin-order
/// prefix when all thresholds are equal, otherwise an exact memoized search
/// over cancelled subsets (at most 64 interferers).
Saturation sic_saturate_receiver(double base, std::span<const Interferer> interferers, std::size_t cap);

/// Successive cancellation, each active receiver independently saturated with
/// base p_k G_kk + eta and cap cfg.stage_cap.
Verdict check_sic(const Instance& inst, const LinkSet& active, const SchemeConfig& cfg);

/// Dispatch on cfg.scheme.
Verdict check(const Instance& inst, const SchemeConfig& cfg, const LinkSet& active);

struct Solution {
    LinkSet active;
    CancelLists cancels;
    double weight = 0.0;

    bool operator==(const Solution&) const = default;
};

/// Sum of weights over `active`, accumulated in ascending value order.
double total_weight(const Instance& inst, const LinkSet& active);

struct Violation {
    std::size_t receiver = 0;
    /// Set when a cancellation failed; empty when the receiver's own SINR failed.
    std::optional<std::size_t> interferer;
    /// 1-based stage of the failed cancellation, 0 for the own-signal check.
    std::size_t stage = 0;
    std::string reason;
};

struct VerifyResult {
    bool valid = false;
    std::optional<Violation> violation;
};

/// Checks an explicit solution, honoring the given cancellation sets and, for
/// SIC, the given order. Throws SolutionError when `sol` is malformed
/// (unsorted or duplicate links, index out of range, cancellation by an
/// inactive receiver or of an inactive link, weight inconsistent with the
/// active set).
VerifyResult verify_solution(const Instance& inst, const SchemeConfig& cfg, const Solution& sol);

}  // namespace linkact
