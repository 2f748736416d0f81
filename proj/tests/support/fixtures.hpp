#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "linkact/feasibility.hpp"
#include "linkact/instance.hpp"
#include "linkact/rng.hpp"

namespace fixture {

using linkact::Instance;

/// Two links, 1 W each, noise 1e-13 W, direct gains 1e-8, cross gains
/// `cross` (1e-7 strong, 1e-9 weak), common threshold `gamma`.
inline Instance e2(double cross = 1e-7, double gamma = 0.5) {
    Instance inst;
    inst.k = 2;
    inst.gains = linkact::GainMatrix(2);
    inst.gains.at(0, 0) = inst.gains.at(1, 1) = 1e-8;
    inst.gains.at(0, 1) = inst.gains.at(1, 0) = cross;
    inst.powers = {1.0, 1.0};
    inst.noise = 1e-13;
    inst.thresholds = {gamma, gamma};
    inst.weights = {1.0, 1.0};
    return inst;
}

/// Topology from one of the four cells with a common threshold and unit or
/// random weights. Used for the random pools.
inline Instance from_cell(std::size_t cell, std::size_t k, std::uint64_t seed, double gamma_db, bool random_weights) {
    const auto dataset = cell < 2 ? linkact::Dataset::I : linkact::Dataset::N;
    const auto density = cell % 2 == 0 ? linkact::Density::sparse : linkact::Density::dense;
    Instance inst = linkact::generate(linkact::TopologySpec::cell(dataset, density, k, seed));
    inst.thresholds.assign(k, linkact::db_to_linear(gamma_db));
    inst.weights.assign(k, 1.0);
    if (random_weights) {
        linkact::Stream s(seed, 0, 99);
        for (auto& w : inst.weights) w = s.uniform(0.5, 2.0);
    }
    return inst;
}

/// Gains drawn log-uniformly so cross links are sometimes stronger than
/// direct ones; individual thresholds from [0.1, 4].
inline Instance scrambled(std::size_t k, std::uint64_t seed) {
    linkact::Stream s(seed, 1000, 7);
    Instance inst;
    inst.k = k;
    inst.gains = linkact::GainMatrix(k);
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t r = 0; r < k; ++r) {
            inst.gains.at(m, r) = std::pow(10.0, s.uniform(m == r ? -9.0 : -11.0, -7.0));
        }
    }
    inst.powers.assign(k, 1.0);
    for (auto& p : inst.powers) p = s.uniform(0.5, 2.0);
    inst.noise = 1e-13;
    inst.thresholds.resize(k);
    for (auto& g : inst.thresholds) g = s.uniform(0.1, 4.0);
    inst.weights.resize(k);
    for (auto& w : inst.weights) w = s.uniform(0.5, 2.0);
    return inst;
}

inline std::vector<linkact::LinkSet> all_subsets(std::size_t k) {
    std::vector<linkact::LinkSet> out;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        linkact::LinkSet a;
        for (std::size_t i = 0; i < k; ++i) {
            if (mask >> i & 1) a.push_back(i);
        }
        out.push_back(a);
    }
    return out;
}

}  // namespace fixture
