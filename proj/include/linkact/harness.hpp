#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "linkact/feasibility.hpp"
#include "linkact/instance.hpp"
#include "linkact/solver.hpp"

namespace linkact {

enum class Study { common_threshold, individual_threshold };
enum class WeightsRule { unit, rate };

struct Cell {
    Dataset dataset = Dataset::I;
    Density density = Density::sparse;
    bool operator==(const Cell&) const = default;
};

/// "I-sparse", "N-dense", ...
std::string to_string(Cell c);
Cell parse_cell(const std::string& s);

struct StudySpec {
    Study study = Study::common_threshold;
    std::vector<Cell> cells;
    std::vector<std::size_t> k_values;
    std::size_t seeds_per_cell = 30;
    /// Seeds used are base_seed, base_seed + 1, ...
    std::uint64_t base_seed = 1;
    /// Study 1: the common thresholds swept. Study 2: the set each link draws from.
    std::vector<double> thresholds_db;
    /// Study 1 only.
    std::vector<Scheme> schemes{Scheme::sud, Scheme::slic, Scheme::pic, Scheme::sic};
    /// Study 2 only: SIC stage caps.
    std::vector<std::size_t> t_values;
    WeightsRule weights_rule = WeightsRule::unit;
    Budget budget = kDefaultBudget;
    std::size_t jobs = 1;
    /// When false solve_ms is written as 0, making the CSV reproducible byte for byte.
    bool record_timing = true;
};

struct ResultRecord {
    Cell cell;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::sud;
    /// Empty for study 2 (per-link thresholds).
    std::optional<double> gamma_db;
    /// Cancellation cap per receiver: 0 SUD, 1 SLIC, K-1 PIC and uncapped SIC.
    std::size_t t_cap = 0;
    std::size_t activated = 0;
    double weight = 0.0;
    double solve_ms = 0.0;
    SolveStatus status = SolveStatus::optimal;
};

/// Per-link thresholds for study 2, uniform over `set_db`, from the link's own
/// stream so nested instances share their draws. Returned in linear scale.
std::vector<double> draw_thresholds(std::size_t k, std::uint64_t seed, const std::vector<double>& set_db);

/// Throws std::invalid_argument when the spec does not fit its study.
void validate(const StudySpec& spec);

/// Topology per (cell, K, seed), solved for every threshold and scheme.
std::vector<ResultRecord> run_study1(const StudySpec& spec);
/// Topology per (cell, K, seed), rate weights, SIC for every T.
std::vector<ResultRecord> run_study2(const StudySpec& spec);
/// Dispatch on spec.study.
std::vector<ResultRecord> run_study(const StudySpec& spec);

inline constexpr const char* kCsvHeader = "dataset,density,k,seed,scheme,gamma_db,t_cap,activated,weight,solve_ms,status";

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::string csv_line(const ResultRecord& r);

enum class GroupKey { dataset, density, k, scheme, gamma_db, t_cap };
enum class Metric { activated, weight };

struct StatRow {
    /// One value per requested key, formatted as in the CSV.
    std::vector<std::string> key;
    double mean = 0.0;
    /// Sample standard deviation (n - 1); 0 for a single record.
    double sd = 0.0;
    std::size_t count = 0;
};

/// Groups in order of first appearance.
std::vector<StatRow> summarize(const std::vector<ResultRecord>& records, const std::vector<GroupKey>& keys,
                               Metric metric = Metric::activated);

}  // namespace linkact
