#include <doctest.h>

#include "linkact/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace linkact;

TEST_CASE("optima on the two-link instance") {
    const Instance inst = fixture::e2();
    SolveReport r = solve_exact(inst, SchemeConfig::pic());
    CHECK(r.solution.active == LinkSet{0, 1});
    CHECK(r.solution.weight == 2.0);
    CHECK(r.status == SolveStatus::optimal);

    r = solve_exact(inst, SchemeConfig::sud());
    CHECK(r.solution.active == LinkSet{0});
    CHECK(r.solution.weight == 1.0);

    const Solution b = brute_force(inst, SchemeConfig::sic(1));
    CHECK(b.active == LinkSet{0, 1});
    CHECK(b.weight == 2.0);
    CHECK(brute_force(inst, SchemeConfig::sud()).active == LinkSet{0});
}

TEST_CASE("degenerate sizes") {
    Instance one;
    one.k = 1;
    one.gains = GainMatrix(1, 1e-8);
    one.powers = {1.0};
    one.noise = 1e-13;
    one.thresholds = {2.0};
    one.weights = {0.7};
    CHECK(solve_exact(one, SchemeConfig::sud()).solution.weight == 0.7);
    one.thresholds = {1e6};
    const SolveReport none = solve_exact(one, SchemeConfig::sic());
    CHECK(none.solution.active.empty());
    CHECK(none.status == SolveStatus::infeasible_empty_only);

    Instance empty;
    empty.noise = 1e-13;
    CHECK(brute_force(empty, SchemeConfig::pic()).active.empty());
    CHECK(brute_force(empty, SchemeConfig::pic()).weight == 0.0);
    CHECK(solve_exact(empty, SchemeConfig::pic()).solution.active.empty());
}

TEST_CASE("brute force refuses large instances") {
    Instance inst = fixture::from_cell(0, 21, 1, 0.0, false);
    CHECK_THROWS_AS(brute_force(inst, SchemeConfig::sud()), std::length_error);
}

TEST_CASE("branch-and-bound matches brute force and the oracle") {
    const std::vector<SchemeConfig> schemes{SchemeConfig::sud(), SchemeConfig::slic(), SchemeConfig::pic(),
                                            SchemeConfig::sic(), SchemeConfig::sic(1), SchemeConfig::sic(2)};
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        const Instance inst = seed % 3 == 0 ? fixture::scrambled(8, seed)
                                            : fixture::from_cell(seed % 4, 8, seed, seed % 2 ? -6.0 : 0.0, seed % 4 < 2);
        for (const auto& cfg : schemes) {
            INFO("seed " << seed << " scheme " << to_string(cfg.scheme) << " cap " << cfg.stage_cap);
            const SolveReport r = solve_exact(inst, cfg);
            const Solution b = brute_force(inst, cfg);
            CHECK(r.solution.weight == b.weight);
            CHECK(r.solution.weight == oracle::best_weight(inst, cfg));
            CHECK(verify_solution(inst, cfg, r.solution).valid);
        }
    }
}

TEST_CASE("solving is deterministic") {
    const Instance inst = fixture::from_cell(3, 14, 9, -6.0, true);
    const auto a = solve_exact(inst, SchemeConfig::pic());
    const auto b = solve_exact(inst, SchemeConfig::pic());
    CHECK(a.solution == b.solution);
    CHECK(a.nodes_explored == b.nodes_explored);
}

TEST_CASE("time limit returns a verified incumbent") {
    const Instance inst = fixture::from_cell(3, 30, 4, -6.0, false);
    const SolveReport r = solve_exact(inst, SchemeConfig::sud(), Budget(1e-6));
    CHECK(r.status == SolveStatus::time_limit);
    CHECK(verify_solution(inst, SchemeConfig::sud(), r.solution).valid);
    CHECK_THROWS_AS(solve_exact(inst, SchemeConfig::sud(), Budget(0.0)), std::invalid_argument);
}

TEST_CASE("reduction on the two-link instances") {
    const double eps = 0.01;
    const Instance strong = fixture::e2();
    const Instance out = reduce_sud_to_pic(strong, eps);
    const double p1 = (1e-7 / 0.49 - 1e-13) / 1e-8;
    CHECK(p1 == doctest::Approx(20.408).epsilon(1e-4));
    CHECK(out.powers[0] == doctest::Approx(p1).epsilon(1e-12));
    CHECK(out.gains.at(0, 1) == doctest::Approx(1e-7 / p1).epsilon(1e-12));
    CHECK(out.gains.at(0, 0) == strong.gains.at(0, 0));
    // Threshold grows with the power so the link's own SINR condition is unchanged.
    CHECK(out.thresholds[0] == doctest::Approx(0.5 * p1).epsilon(1e-12));
    CHECK(out.received(0, 1) == doctest::Approx(strong.received(0, 1)).epsilon(1e-12));

    const Instance weak = fixture::e2(1e-9);
    CHECK((1e-9 / 0.49 - 1e-13) / 1e-8 == doctest::Approx(0.204).epsilon(1e-3));
    CHECK(reduce_sud_to_pic(weak, eps) == weak);

    Instance one = fixture::e2();
    one.k = 1;
    one.gains = GainMatrix(1, 1e-8);
    one.powers = {1.0};
    one.thresholds = {0.5};
    one.weights = {1.0};
    CHECK(reduce_sud_to_pic(one, eps) == one);

    CHECK_THROWS_AS(reduce_sud_to_pic(strong, 0.0), std::domain_error);
    CHECK_THROWS_AS(reduce_sud_to_pic(strong, 0.5), std::domain_error);
    CHECK(default_reduction_epsilon(strong) == doctest::Approx(5e-4));
}

TEST_CASE("dividing the threshold by the power ratio instead breaks the equivalence") {
    // Literal reading: threshold scaled by p/p' rather than p'/p.
    const Instance strong = fixture::e2();
    Instance literal = reduce_sud_to_pic(strong, 0.01);
    for (std::size_t k = 0; k < 2; ++k) {
        const double ratio = literal.powers[k] / strong.powers[k];
        literal.thresholds[k] = strong.thresholds[k] / ratio;
    }
    CHECK(literal.thresholds[0] == doctest::Approx(0.0245).epsilon(1e-3));
    CHECK_FALSE(check_sud(strong, {0, 1}));
    CHECK(check_pic(literal, {0, 1}).feasible);
    CHECK_FALSE(check_pic(reduce_sud_to_pic(strong, 0.01), {0, 1}).feasible);
}

TEST_CASE("reduction preserves single-user feasible sets and blocks every cancellation") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance inst = seed % 2 ? fixture::scrambled(7, seed) : fixture::from_cell(seed % 4, 7, seed, 0.0, false);
        const Instance red = reduce_sud_to_pic(inst, default_reduction_epsilon(inst));
        for (const auto& a : fixture::all_subsets(inst.k)) {
            CHECK(check_sud(inst, a) == check_pic(red, a).feasible);
            for (const auto& c : pic_cancel_sets(red, a)) CHECK(c.empty());
        }
        CHECK(solve_exact(inst, SchemeConfig::sud()).solution.weight ==
              solve_exact(red, SchemeConfig::pic()).solution.weight);
    }
}

TEST_CASE("optimum dominance and stage-cap monotonicity") {
    for (std::uint64_t seed = 1; seed <= 16; ++seed) {
        const Instance inst = seed % 2 ? fixture::scrambled(9, seed) : fixture::from_cell(seed % 4, 9, seed, -3.0, true);
        const double sud = solve_exact(inst, SchemeConfig::sud()).solution.weight;
        const double slic = solve_exact(inst, SchemeConfig::slic()).solution.weight;
        const double pic = solve_exact(inst, SchemeConfig::pic()).solution.weight;
        const double sic = solve_exact(inst, SchemeConfig::sic()).solution.weight;
        CHECK(sud <= slic);
        CHECK(slic <= pic);
        CHECK(pic <= sic);
        double prev = 0.0;
        for (std::size_t t = 0; t < inst.k; ++t) {
            const double w = solve_exact(inst, SchemeConfig::sic(t)).solution.weight;
            if (t == 0) CHECK(w == sud);
            if (t == 1) CHECK(w >= slic);
            CHECK(w >= prev);
            prev = w;
        }
        CHECK(prev == sic);
    }
}
