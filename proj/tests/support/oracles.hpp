#pragma once

// Reference implementations used only by tests. They follow the condition
// definitions literally (fresh sums, exhaustive search) and share nothing with
// the library except the Instance type and the tolerance rule.

#include <cstdint>
#include <optional>
#include <vector>

#include "linkact/feasibility.hpp"
#include "linkact/ilpgen.hpp"
#include "linkact/instance.hpp"

namespace oracle {

using linkact::Instance;
using linkact::LinkSet;

bool ge(double signal, double denominator, double gamma);

bool sud(const Instance& inst, const LinkSet& a);
/// Some choice of per-receiver cancellation subsets satisfies the PIC
/// conditions. `max_per_receiver` = 1 gives SLIC.
bool pic(const Instance& inst, const LinkSet& a, std::size_t max_per_receiver = SIZE_MAX);
/// Some cancellation sequence of length <= cap at every receiver.
bool sic(const Instance& inst, const LinkSet& a, std::size_t cap);
bool feasible(const Instance& inst, const linkact::SchemeConfig& cfg, const LinkSet& a);

struct Interferer {
    double power;
    double threshold;
};

/// Every cancelled set (bitmask over the interferer list) reachable by some
/// sequence of at most `cap` decodable cancellations, the empty set included.
std::vector<std::uint32_t> reachable(double base, const std::vector<Interferer>& in, std::size_t cap);

/// Cancelled set reached by trying interferers in descending margin order and
/// stopping at the first that cannot be decoded.
std::uint32_t sorted_greedy(double base, const std::vector<Interferer>& in);

/// Maximum feasible weight by enumerating all subsets with the checkers above.
double best_weight(const Instance& inst, const linkact::SchemeConfig& cfg);

/// Whether the cancellation variables of `model` can be completed so that
/// every row holds, given x fixed by `active` (bit k = x_k).
bool completion_exists(const linkact::IlpModel& model, std::uint32_t active);

/// Maximum objective over all x assignments that admit a completion.
double ilp_optimum(const linkact::IlpModel& model);

}  // namespace oracle
