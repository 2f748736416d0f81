#include <doctest.h>

#include <cmath>
#include <sstream>

#include "linkact/harness.hpp"

using namespace linkact;

namespace {

StudySpec small_study1() {
    StudySpec s;
    s.study = Study::common_threshold;
    s.cells = {Cell{Dataset::I, Density::dense}};
    s.k_values = {5, 10};
    s.seeds_per_cell = 3;
    s.thresholds_db = {-6.0, 3.0};
    s.record_timing = false;
    return s;
}

StudySpec small_study2() {
    StudySpec s;
    s.study = Study::individual_threshold;
    s.cells = {Cell{Dataset::I, Density::sparse}, Cell{Dataset::N, Density::dense}};
    s.k_values = {6};
    s.seeds_per_cell = 3;
    s.thresholds_db = {-6.0, -3.0, 3.0};
    s.t_values = {0, 1, 2, 3, 4, 5};
    s.weights_rule = WeightsRule::rate;
    s.record_timing = false;
    return s;
}

std::string csv(const std::vector<ResultRecord>& r) {
    std::ostringstream out;
    write_csv(out, r);
    return out.str();
}

}  // namespace

TEST_CASE("study 1 record count, order and dominance") {
    const auto records = run_study1(small_study1());
    REQUIRE(records.size() == 48);
    CHECK(records[0].scheme == Scheme::sud);
    CHECK(records[3].scheme == Scheme::sic);
    CHECK(records[0].gamma_db == std::optional<double>{-6.0});
    CHECK(records[4].gamma_db == std::optional<double>{3.0});
    for (std::size_t i = 0; i < records.size(); i += 4) {
        CHECK(records[i].activated <= records[i + 1].activated);
        CHECK(records[i + 1].activated <= records[i + 2].activated);
        CHECK(records[i + 2].activated <= records[i + 3].activated);
        CHECK(records[i].t_cap == 0);
        CHECK(records[i + 1].t_cap == 1);
        CHECK(records[i + 3].t_cap == records[i + 3].k - 1);
        for (std::size_t j = i; j < i + 4; ++j) {
            CHECK(records[j].activated <= records[j].k);
            CHECK(records[j].weight == static_cast<double>(records[j].activated));
            CHECK(records[j].solve_ms == 0.0);
        }
    }
}

TEST_CASE("output is byte-identical across runs and worker counts") {
    StudySpec s = small_study1();
    const std::string one = csv(run_study1(s));
    s.jobs = 3;
    CHECK(csv(run_study1(s)) == one);
    CHECK(one.rfind(std::string(kCsvHeader) + "\n", 0) == 0);

    StudySpec t = small_study2();
    const std::string two = csv(run_study2(t));
    t.jobs = 4;
    CHECK(csv(run_study2(t)) == two);
}

TEST_CASE("study 2 throughput is nondecreasing in the stage cap") {
    const auto records = run_study2(small_study2());
    REQUIRE(records.size() == 2 * 3 * 6);
    for (std::size_t i = 0; i < records.size(); i += 6) {
        for (std::size_t t = 0; t < 6; ++t) {
            CHECK(records[i + t].t_cap == t);
            CHECK_FALSE(records[i + t].gamma_db.has_value());
            if (t > 0) CHECK(records[i + t].weight >= records[i + t - 1].weight);
        }
    }
    CHECK(csv(records).find(",mixed,") != std::string::npos);
}

TEST_CASE("per-link thresholds are drawn from the set and nest across K") {
    const std::vector<double> set{-6.0, -3.0, 3.0};
    const auto a = draw_thresholds(10, 5, set);
    const auto b = draw_thresholds(20, 5, set);
    for (std::size_t i = 0; i < 10; ++i) CHECK(a[i] == b[i]);
    bool seen[3] = {false, false, false};
    for (double g : b) {
        bool member = false;
        for (std::size_t j = 0; j < 3; ++j) {
            if (g == db_to_linear(set[j])) member = seen[j] = true;
        }
        CHECK(member);
    }
    CHECK((seen[0] && seen[1] && seen[2]));
}

TEST_CASE("spec validation") {
    StudySpec s = small_study1();
    s.k_values.clear();
    CHECK_THROWS_AS(run_study1(s), std::invalid_argument);
    StudySpec t = small_study2();
    t.weights_rule = WeightsRule::unit;
    CHECK_THROWS_AS(run_study2(t), std::invalid_argument);
    CHECK_THROWS_AS(run_study2(small_study1()), std::invalid_argument);
    CHECK(parse_cell("N-dense") == Cell{Dataset::N, Density::dense});
    CHECK(to_string(Cell{Dataset::I, Density::sparse}) == "I-sparse");
    CHECK_THROWS(parse_cell("I"));
}

TEST_CASE("CSV formatting") {
    ResultRecord r;
    r.cell = {Dataset::N, Density::sparse};
    r.k = 30;
    r.seed = 7;
    r.scheme = Scheme::pic;
    r.gamma_db = -6.0;
    r.t_cap = 29;
    r.activated = 23;
    r.weight = 1.0 / 3.0;
    r.solve_ms = 1234.56789;
    CHECK(csv_line(r) == "N,sparse,30,7,pic,-6,29,23,0.333333,1234.57,optimal");
    r.gamma_db.reset();
    r.status = SolveStatus::time_limit;
    CHECK(csv_line(r) == "N,sparse,30,7,pic,mixed,29,23,0.333333,1234.57,time_limit");
}

TEST_CASE("summaries") {
    std::vector<ResultRecord> rs(30);
    for (auto& r : rs) r.activated = 10;
    auto rows = summarize(rs, {GroupKey::scheme});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == 10.0);
    CHECK(rows[0].sd == 0.0);
    CHECK(rows[0].count == 30);

    std::vector<ResultRecord> two(2);
    two[0].activated = 2;
    two[1].activated = 4;
    rows = summarize(two, {});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == 3.0);
    CHECK(rows[0].sd == doctest::Approx(std::sqrt(2.0)));

    CHECK(summarize({}, {GroupKey::k}).empty());

    const auto study = run_study1(small_study1());
    rows = summarize(study, {GroupKey::scheme, GroupKey::k});
    CHECK(rows.size() == 8);
    CHECK(rows[0].key == std::vector<std::string>{"sud", "5"});
    CHECK(rows[1].key == std::vector<std::string>{"slic", "5"});
    for (const auto& row : rows) CHECK(row.count == 6);

    rows = summarize(study, {GroupKey::gamma_db}, Metric::weight);
    CHECK(rows.size() == 2);
    CHECK(rows[0].key == std::vector<std::string>{"-6"});
}
