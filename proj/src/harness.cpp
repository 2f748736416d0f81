#include "linkact/harness.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "linkact/rng.hpp"

namespace linkact {

std::string to_string(Cell c) { return to_string(c.dataset) + "-" + to_string(c.density); }

Cell parse_cell(const std::string& s) {
    const auto dash = s.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("cell '" + s + "' is not of the form I-sparse");
    return Cell{parse_dataset(s.substr(0, dash)), parse_density(s.substr(dash + 1))};
}

namespace {

constexpr std::uint64_t kThresholdStream = 2;

struct Unit {
    Cell cell;
    std::size_t k;
    std::uint64_t seed;
};

std::vector<Unit> units_of(const StudySpec& spec) {
    std::vector<Unit> units;
    for (const Cell& c : spec.cells) {
        for (std::size_t k : spec.k_values) {
            for (std::size_t s = 0; s < spec.seeds_per_cell; ++s) units.push_back({c, k, spec.base_seed + s});
        }
    }
    return units;
}

ResultRecord solve_record(const Unit& u, const Instance& inst, const SchemeConfig& cfg, const StudySpec& spec) {
    const SolveReport rep = solve_exact(inst, cfg, spec.budget);
    ResultRecord r;
    r.cell = u.cell;
    r.k = u.k;
    r.seed = u.seed;
    r.scheme = cfg.scheme;
    r.t_cap = std::min(cfg.stage_cap, u.k > 0 ? u.k - 1 : 0);
    r.activated = rep.solution.active.size();
    r.weight = rep.solution.weight;
    r.solve_ms = spec.record_timing ? std::chrono::duration<double, std::milli>(rep.wall_time).count() : 0.0;
    r.status = rep.status;
    return r;
}

std::vector<ResultRecord> study1_unit(const Unit& u, const StudySpec& spec) {
    Instance inst = generate(TopologySpec::cell(u.cell.dataset, u.cell.density, u.k, u.seed));
    std::vector<ResultRecord> out;
    for (double g_db : spec.thresholds_db) {
        const double g = db_to_linear(g_db);
        inst.thresholds.assign(u.k, g);
        inst.weights.assign(u.k, spec.weights_rule == WeightsRule::unit ? 1.0 : rate_weight(g));
        for (Scheme s : spec.schemes) {
            SchemeConfig cfg{s, 0};
            if (s == Scheme::slic) cfg = SchemeConfig::slic();
            if (s == Scheme::pic) cfg = SchemeConfig::pic();
            if (s == Scheme::sic) cfg = SchemeConfig::sic();
            ResultRecord r = solve_record(u, inst, cfg, spec);
            r.gamma_db = g_db;
            out.push_back(r);
        }
    }
    return out;
}

std::vector<ResultRecord> study2_unit(const Unit& u, const StudySpec& spec) {
    Instance inst = generate(TopologySpec::cell(u.cell.dataset, u.cell.density, u.k, u.seed));
    inst.thresholds = draw_thresholds(u.k, u.seed, spec.thresholds_db);
    inst.weights.resize(u.k);
    for (std::size_t i = 0; i < u.k; ++i) inst.weights[i] = rate_weight(inst.thresholds[i]);
    std::vector<ResultRecord> out;
    for (std::size_t t : spec.t_values) {
        ResultRecord r = solve_record(u, inst, SchemeConfig::sic(t), spec);
        r.t_cap = t;
        out.push_back(r);
    }
    return out;
}

template <typename Fn>
std::vector<ResultRecord> run_units(const StudySpec& spec, Fn fn) {
    const std::vector<Unit> units = units_of(spec);
    std::vector<std::vector<ResultRecord>> slots(units.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(spec.jobs, units.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < units.size(); ++i) slots[i] = fn(units[i], spec);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < units.size();) {
                    try {
                        slots[i] = fn(units[i], spec);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = units.size();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    std::vector<ResultRecord> records;
    for (auto& s : slots) records.insert(records.end(), s.begin(), s.end());
    return records;
}

}  // namespace

std::vector<double> draw_thresholds(std::size_t k, std::uint64_t seed, const std::vector<double>& set_db) {
    if (set_db.empty()) throw std::invalid_argument("threshold set is empty");
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        Stream s(seed, i, kThresholdStream);
        out[i] = db_to_linear(set_db[s.below(set_db.size())]);
    }
    return out;
}

void validate(const StudySpec& spec) {
    if (spec.cells.empty()) throw std::invalid_argument("study: no dataset cells");
    if (spec.k_values.empty()) throw std::invalid_argument("study: no K values");
    if (spec.seeds_per_cell == 0) throw std::invalid_argument("study: seeds_per_cell must be positive");
    if (spec.thresholds_db.empty()) throw std::invalid_argument("study: no thresholds");
    for (std::size_t k : spec.k_values) {
        if (k == 0) throw std::invalid_argument("study: K must be positive");
    }
    if (!(spec.budget.count() > 0.0)) throw std::invalid_argument("study: budget must be positive");
    if (spec.study == Study::common_threshold) {
        if (spec.schemes.empty()) throw std::invalid_argument("study 1: no schemes");
    } else {
        if (spec.t_values.empty()) throw std::invalid_argument("study 2: no stage caps");
        if (spec.weights_rule != WeightsRule::rate) throw std::invalid_argument("study 2: weights must be rate based");
    }
}

std::vector<ResultRecord> run_study1(const StudySpec& spec) {
    if (spec.study != Study::common_threshold) throw std::invalid_argument("run_study1: spec is not study 1");
    validate(spec);
    return run_units(spec, study1_unit);
}

std::vector<ResultRecord> run_study2(const StudySpec& spec) {
    if (spec.study != Study::individual_threshold) throw std::invalid_argument("run_study2: spec is not study 2");
    validate(spec);
    return run_units(spec, study2_unit);
}

std::vector<ResultRecord> run_study(const StudySpec& spec) {
    return spec.study == Study::common_threshold ? run_study1(spec) : run_study2(spec);
}

namespace {

std::string g6(double v) { return fmt::format("{:.6g}", v); }

std::string key_value(const ResultRecord& r, GroupKey key) {
    switch (key) {
        case GroupKey::dataset: return to_string(r.cell.dataset);
        case GroupKey::density: return to_string(r.cell.density);
        case GroupKey::k: return std::to_string(r.k);
        case GroupKey::scheme: return to_string(r.scheme);
        case GroupKey::gamma_db: return r.gamma_db ? g6(*r.gamma_db) : "mixed";
        case GroupKey::t_cap: return std::to_string(r.t_cap);
    }
    return "";
}

}  // namespace

std::string csv_line(const ResultRecord& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", to_string(r.cell.dataset), to_string(r.cell.density), r.k,
                       r.seed, to_string(r.scheme), r.gamma_db ? g6(*r.gamma_db) : "mixed", r.t_cap, r.activated,
                       g6(r.weight), g6(r.solve_ms), to_string(r.status));
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) out << csv_line(r) << '\n';
}

std::vector<StatRow> summarize(const std::vector<ResultRecord>& records, const std::vector<GroupKey>& keys,
                               Metric metric) {
    std::vector<StatRow> rows;
    std::vector<std::vector<double>> values;
    std::map<std::vector<std::string>, std::size_t> where;
    for (const auto& r : records) {
        std::vector<std::string> key;
        for (GroupKey g : keys) key.push_back(key_value(r, g));
        auto [it, fresh] = where.emplace(key, rows.size());
        if (fresh) {
            rows.push_back(StatRow{std::move(key), 0.0, 0.0, 0});
            values.emplace_back();
        }
        values[it->second].push_back(metric == Metric::activated ? static_cast<double>(r.activated) : r.weight);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& v = values[i];
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        rows[i].mean = mean;
        rows[i].sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        rows[i].count = v.size();
    }
    return rows;
}

}  // namespace linkact
