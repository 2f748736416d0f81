#include "linkact/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cctype>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "linkact/errors.hpp"
#include "linkact/harness.hpp"
#include "linkact/ilpgen.hpp"
#include "linkact/instance.hpp"

namespace linkact {

namespace {

using json = nlohmann::json;

class UsageError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

std::string stage_text(std::size_t cap) {
    return cap == kUnlimitedStages ? std::string("null") : std::to_string(cap);
}

// "5,10,15" or "5..15" or a mix of both.
template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            const auto dots = item.find("..");
            if constexpr (std::is_integral_v<T>) {
                if (dots != std::string::npos) {
                    const long long lo = std::stoll(item.substr(0, dots)), hi = std::stoll(item.substr(dots + 2));
                    if (lo < 0 || hi < lo) throw UsageError(what + ": bad range '" + item + "'");
                    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<T>(v));
                    continue;
                }
                const long long v = std::stoll(item);
                if (v < 0) throw UsageError(what + ": negative value '" + item + "'");
                out.push_back(static_cast<T>(v));
            } else {
                if (dots != std::string::npos) throw UsageError(what + ": ranges are for integers only");
                out.push_back(std::stod(item));
            }
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError(what + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(what + ": empty list");
    return out;
}

struct Parameters {
    std::optional<double> gamma_db;
    std::optional<double> gamma_lin;
    std::string weights;

    void add_to(CLI::App* cmd) {
        auto* db = cmd->add_option("--gamma-db", gamma_db, "Common SINR threshold in dB");
        auto* lin = cmd->add_option("--gamma-lin", gamma_lin, "Common SINR threshold, linear");
        db->excludes(lin);
        cmd->add_option("--weights", weights, "unit, rate, or a file of K weights");
    }

    void apply(Instance& inst) const {
        if (gamma_lin && !(*gamma_lin > 0.0)) throw UsageError("--gamma-lin must be positive");
        if (gamma_db) inst.thresholds.assign(inst.k, db_to_linear(*gamma_db));
        if (gamma_lin) inst.thresholds.assign(inst.k, *gamma_lin);
        if (!inst.has_thresholds()) throw UsageError("instance has no thresholds; pass --gamma-db or --gamma-lin");
        if (weights == "unit") {
            inst.weights.assign(inst.k, 1.0);
        } else if (weights == "rate") {
            inst.weights.resize(inst.k);
            for (std::size_t i = 0; i < inst.k; ++i) inst.weights[i] = rate_weight(inst.thresholds[i]);
        } else if (!weights.empty()) {
            inst.weights = read_weights(weights, inst.k);
        } else if (!inst.has_weights()) {
            inst.weights.assign(inst.k, 1.0);
        }
        validate_complete(inst);
    }

    // A JSON array or whitespace-separated numbers.
    static std::vector<double> read_weights(const std::string& path, std::size_t k) {
        const std::string text = read_text(path);
        std::vector<double> w;
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '[') {
            try {
                w = json::parse(text).get<std::vector<double>>();
            } catch (const json::exception& e) {
                throw ParseError("weights", e.what());
            }
        } else {
            std::istringstream in(text);
            std::string tok;
            while (in >> tok) {
                try {
                    w.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    throw ParseError("weights", "'" + tok + "' is not a number");
                }
            }
        }
        if (w.size() != k) throw ParseError("weights", fmt::format("expected {} values, found {}", k, w.size()));
        return w;
    }
};

SchemeConfig config_for(const std::string& scheme, std::optional<std::size_t> t_cap) {
    Scheme s;
    try {
        s = parse_scheme(scheme);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    switch (s) {
        case Scheme::sud: return SchemeConfig::sud();
        case Scheme::slic: return SchemeConfig::slic();
        case Scheme::pic: return SchemeConfig::pic();
        case Scheme::sic: return SchemeConfig::sic(t_cap.value_or(kUnlimitedStages));
    }
    return SchemeConfig::sud();
}

Formulation formulation_for(const SchemeConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::sud: return Formulation::sud;
        case Scheme::slic: return Formulation::slic;
        case Scheme::pic: return Formulation::pic;
        case Scheme::sic: return Formulation::sic_general;
    }
    return Formulation::sud;
}

Formulation parse_formulation_flag(const std::string& s) {
    try {
        return parse_formulation(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

std::string dump_solution(const Solution& sol, const SchemeConfig& cfg, const SolveReport* report) {
    std::string out = "{\n";
    out += fmt::format("  \"scheme\": \"{}\",\n", to_string(cfg.scheme));
    out += fmt::format("  \"t_cap\": {},\n", stage_text(cfg.stage_cap));
    std::vector<std::size_t> ids;
    for (std::size_t k : sol.active) ids.push_back(k + 1);
    out += fmt::format("  \"active\": [{}],\n", fmt::join(ids, ", "));
    out += "  \"cancels\": {";
    bool first = true;
    for (std::size_t k = 0; k < sol.cancels.size(); ++k) {
        if (sol.cancels[k].empty()) continue;
        std::vector<std::size_t> list;
        for (std::size_t m : sol.cancels[k]) list.push_back(m + 1);
        out += fmt::format("{}\n    \"{}\": [{}]", first ? "" : ",", k + 1, fmt::join(list, ", "));
        first = false;
    }
    out += first ? "},\n" : "\n  },\n";
    out += fmt::format("  \"weight\": {:.17g}", sol.weight);
    if (report) {
        out += fmt::format(",\n  \"status\": \"{}\",\n  \"nodes\": {}", to_string(report->status),
                           report->nodes_explored);
    }
    out += "\n}\n";
    return out;
}

SolutionDoc parse_solution(const std::string& text, std::size_t k) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("solution", e.what());
    }
    if (!doc.is_object()) throw ParseError("solution", "expected a JSON object");
    auto link_id = [&](const json& v, const std::string& field) -> std::size_t {
        if (!v.is_number_integer()) throw ParseError(field, "link ids must be integers");
        const auto id = v.get<long long>();
        if (id < 1 || static_cast<std::size_t>(id) > k) throw ParseError(field, fmt::format("link id {} outside 1..{}", id, k));
        return static_cast<std::size_t>(id - 1);
    };

    SolutionDoc out;
    try {
        if (!doc.contains("scheme") || !doc["scheme"].is_string()) throw ParseError("scheme", "missing or not a string");
        std::optional<std::size_t> cap;
        if (doc.contains("t_cap") && !doc["t_cap"].is_null()) {
            if (!doc["t_cap"].is_number_unsigned()) throw ParseError("t_cap", "must be a nonnegative integer or null");
            cap = doc["t_cap"].get<std::size_t>();
        }
        try {
            out.config = config_for(doc["scheme"].get<std::string>(), cap);
        } catch (const UsageError& e) {
            throw ParseError("scheme", e.what());
        }
        if (!doc.contains("active") || !doc["active"].is_array()) throw ParseError("active", "missing or not an array");
        for (const auto& v : doc["active"]) out.solution.active.push_back(link_id(v, "active"));
        out.solution.cancels.assign(k, {});
        if (doc.contains("cancels")) {
            if (!doc["cancels"].is_object()) throw ParseError("cancels", "expected an object keyed by receiver id");
            for (const auto& [key, list] : doc["cancels"].items()) {
                const std::string field = "cancels." + key;
                std::size_t rx = 0;
                try {
                    std::size_t used = 0;
                    const long long id = std::stoll(key, &used);
                    if (used != key.size() || id < 1 || static_cast<std::size_t>(id) > k) throw std::out_of_range(key);
                    rx = static_cast<std::size_t>(id - 1);
                } catch (const std::exception&) {
                    throw ParseError(field, "receiver id outside 1.." + std::to_string(k));
                }
                if (!list.is_array()) throw ParseError(field, "expected an array");
                for (const auto& v : list) out.solution.cancels[rx].push_back(link_id(v, field));
            }
        }
        if (!doc.contains("weight") || !doc["weight"].is_number()) throw ParseError("weight", "missing or not a number");
        out.solution.weight = doc["weight"].get<double>();
    } catch (const json::exception& e) {
        throw ParseError("solution", e.what());
    }
    return out;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximum-weight link activation under the SINR model with interference cancellation", "linkact"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random topology");
    std::string g_dataset = "I", g_density = "sparse", g_out;
    std::size_t g_k = 10;
    std::uint64_t g_seed = 1;
    gen->add_option("--dataset", g_dataset, "I or N");
    gen->add_option("--density", g_density, "sparse or dense");
    gen->add_option("-K,--links", g_k, "Number of links")->required();
    gen->add_option("--seed", g_seed, "Master seed");
    gen->add_option("-o,--output", g_out, "Instance file (default stdout)");

    // solve
    auto* solve = app.add_subcommand("solve", "Maximum-weight activation set");
    std::string s_in, s_scheme = "sic", s_out, s_assign;
    std::optional<std::size_t> s_t;
    double s_limit = kDefaultBudget.count();
    Parameters s_par;
    solve->add_option("-i,--instance", s_in, "Instance file")->required();
    solve->add_option("--scheme", s_scheme, "sud, slic, pic, or sic");
    solve->add_option("-T,--stages", s_t, "SIC cancellation cap (default unlimited)");
    solve->add_option("--time-limit", s_limit, "Seconds");
    solve->add_option("-o,--output", s_out, "Solution document (default stdout)");
    solve->add_option("--assignment", s_assign, "Also write the solution as ILP variable values");
    s_par.add_to(solve);

    // check
    auto* check_cmd = app.add_subcommand("check", "Verify a solution document or ILP assignment");
    std::string c_in, c_sol, c_scheme;
    std::optional<std::size_t> c_t;
    Parameters c_par;
    check_cmd->add_option("-i,--instance", c_in, "Instance file")->required();
    check_cmd->add_option("--solution", c_sol, "Solution JSON or 'name value' assignment")->required();
    check_cmd->add_option("--scheme", c_scheme, "Scheme or formulation; required for assignments");
    check_cmd->add_option("-T,--stages", c_t, "Stage cap");
    c_par.add_to(check_cmd);

    // emit-ilp
    auto* emit = app.add_subcommand("emit-ilp", "Write the integer program");
    std::string e_in, e_scheme = "pic", e_format = "lp", e_out;
    std::optional<std::size_t> e_t;
    bool e_nofix = false;
    Parameters e_par;
    emit->add_option("-i,--instance", e_in, "Instance file")->required();
    emit->add_option("--scheme", e_scheme, "sud, slic, pic, sic-common, sic-general (sic)");
    emit->add_option("-T,--stages", e_t, "Stages of the general SIC model (default K-1)");
    emit->add_option("--format", e_format, "Model format");
    emit->add_flag("--no-fixings", e_nofix, "Skip the preprocessing bounds");
    emit->add_option("-o,--output", e_out, "Model file (default stdout)");
    e_par.add_to(emit);

    // reduce
    auto* reduce = app.add_subcommand("reduce", "Transform an instance so PIC feasibility equals SUD feasibility");
    std::string r_in, r_out;
    std::optional<double> r_eps;
    Parameters r_par;
    reduce->add_option("-i,--instance", r_in, "Instance file")->required();
    reduce->add_option("--epsilon", r_eps, "Default 1e-3 times the smallest threshold");
    reduce->add_option("-o,--output", r_out, "Instance file (default stdout)");
    r_par.add_to(reduce);

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a study and write CSV");
    int x_study = 1;
    std::string x_cells = "I-sparse,I-dense,N-sparse,N-dense", x_k = "5..30", x_gamma, x_schemes = "sud,slic,pic,sic",
                x_t = "0..5", x_weights, x_out;
    std::size_t x_seeds = 30, x_jobs = 1;
    std::uint64_t x_seed = 1;
    double x_limit = kDefaultBudget.count();
    bool x_notiming = false;
    exp->add_option("--study", x_study, "1 (common threshold) or 2 (individual thresholds)")
        ->check(CLI::IsMember({1, 2}));
    exp->add_option("--cells", x_cells, "Comma list of I-sparse, I-dense, N-sparse, N-dense");
    exp->add_option("-K,--links", x_k, "K values, e.g. 5..30 or 5,10");
    exp->add_option("--seeds", x_seeds, "Instances per cell");
    exp->add_option("--seed", x_seed, "First seed");
    exp->add_option("--gamma-db", x_gamma, "Study 1: thresholds swept; study 2: draw set");
    exp->add_option("--schemes", x_schemes, "Study 1 schemes");
    exp->add_option("-T,--stages", x_t, "Study 2 stage caps");
    exp->add_option("--weights", x_weights, "unit or rate (study 2: rate)");
    exp->add_option("--time-limit", x_limit, "Seconds per solve");
    exp->add_option("--jobs", x_jobs, "Worker threads")->check(CLI::PositiveNumber);
    exp->add_flag("--no-timing", x_notiming, "Write solve_ms as 0");
    exp->add_option("-o,--output", x_out, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    try {
        if (*gen) {
            TopologySpec spec = TopologySpec::cell(parse_dataset(g_dataset), parse_density(g_density), g_k, g_seed);
            if (g_k == 0) throw UsageError("-K must be positive");
            write_text(g_out, dump_instance(generate(spec)), out);
            return exit_code::ok;
        }

        if (*solve) {
            Instance inst = read_instance(s_in);
            s_par.apply(inst);
            const SchemeConfig cfg = config_for(s_scheme, s_t);
            if (!(s_limit > 0.0)) throw UsageError("--time-limit must be positive");
            const SolveReport rep = solve_exact(inst, cfg, Budget(s_limit));
            write_text(s_out, dump_solution(rep.solution, cfg, &rep), out);
            if (!s_assign.empty()) {
                const std::size_t stages = cfg.scheme == Scheme::sic ? cfg.stage_cap : kUnlimitedStages;
                const IlpModel model = build_model(inst, formulation_for(cfg), stages);
                write_text(s_assign, format_assignment(model, assignment_from_solution(model, rep.solution)), out);
            }
            if (rep.status == SolveStatus::time_limit) {
                err << "time limit reached; best solution found so far written\n";
                return exit_code::time_limit;
            }
            return exit_code::ok;
        }

        if (*check_cmd) {
            Instance inst = read_instance(c_in);
            c_par.apply(inst);
            const std::string text = read_text(c_sol);
            const auto first = text.find_first_not_of(" \t\r\n");
            Solution sol;
            SchemeConfig cfg;
            if (first != std::string::npos && text[first] == '{') {
                SolutionDoc doc = parse_solution(text, inst.k);
                sol = std::move(doc.solution);
                cfg = c_scheme.empty() ? doc.config : config_for(c_scheme, c_t);
            } else {
                if (c_scheme.empty()) throw UsageError("--scheme is required to check an assignment");
                const Formulation f = parse_formulation_flag(c_scheme);
                const IlpModel model = build_model(inst, f, c_t.value_or(kUnlimitedStages));
                const Assignment a = parse_assignment(text, model);
                if (auto row = first_violated_row(model, a)) {
                    out << "invalid: constraint " << *row << " violated\n";
                    return exit_code::invalid;
                }
                sol = solution_from_assignment(inst, model, a);
                cfg = scheme_of(f, model.stages);
            }
            VerifyResult res;
            try {
                res = verify_solution(inst, cfg, sol);
            } catch (const SolutionError& e) {
                out << "invalid: " << e.what() << '\n';
                return exit_code::invalid;
            }
            if (res.valid) {
                out << fmt::format("valid: {} links, weight {:.17g}\n", sol.active.size(), sol.weight);
                return exit_code::ok;
            }
            const Violation& v = *res.violation;
            out << "invalid: receiver " << v.receiver + 1;
            if (v.interferer) out << ", cancelling " << *v.interferer + 1 << " at stage " << v.stage;
            out << ": " << v.reason << '\n';
            return exit_code::invalid;
        }

        if (*emit) {
            Instance inst = read_instance(e_in);
            e_par.apply(inst);
            const Formulation f = parse_formulation_flag(e_scheme);
            write_text(e_out, emit_model(inst, f, e_t.value_or(kUnlimitedStages), e_format, !e_nofix), out);
            return exit_code::ok;
        }

        if (*reduce) {
            Instance inst = read_instance(r_in);
            r_par.apply(inst);
            const double eps = r_eps.value_or(default_reduction_epsilon(inst));
            write_text(r_out, dump_instance(reduce_sud_to_pic(inst, eps)), out);
            return exit_code::ok;
        }

        if (*exp) {
            StudySpec spec;
            spec.study = x_study == 1 ? Study::common_threshold : Study::individual_threshold;
            spec.cells.clear();
            std::stringstream ss(x_cells);
            for (std::string c; std::getline(ss, c, ',');) {
                if (!c.empty()) spec.cells.push_back(parse_cell(c));
            }
            spec.k_values = parse_list<std::size_t>(x_k, "-K");
            spec.seeds_per_cell = x_seeds;
            spec.base_seed = x_seed;
            if (x_gamma.empty()) x_gamma = x_study == 1 ? "-9,-6,-3,0,3,6" : "-6,-3,3";
            spec.thresholds_db = parse_list<double>(x_gamma, "--gamma-db");
            spec.schemes.clear();
            std::stringstream sc(x_schemes);
            for (std::string s; std::getline(sc, s, ',');) {
                if (!s.empty()) spec.schemes.push_back(config_for(s, std::nullopt).scheme);
            }
            spec.t_values = parse_list<std::size_t>(x_t, "-T");
            if (x_weights.empty()) x_weights = x_study == 1 ? "unit" : "rate";
            if (x_weights != "unit" && x_weights != "rate") throw UsageError("--weights must be unit or rate");
            spec.weights_rule = x_weights == "unit" ? WeightsRule::unit : WeightsRule::rate;
            if (!(x_limit > 0.0)) throw UsageError("--time-limit must be positive");
            spec.budget = Budget(x_limit);
            spec.jobs = x_jobs;
            spec.record_timing = !x_notiming;
            validate(spec);
            const auto records = run_study(spec);
            std::ostringstream csv;
            write_csv(csv, records);
            write_text(x_out, csv.str(), out);
            return exit_code::ok;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_code::io;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_code::io;
    } catch (const ModelError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const SolutionError& e) {
        err << "invalid solution: " << e.what() << '\n';
        return exit_code::invalid;
    } catch (const std::domain_error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_code::usage;
}

}  // namespace linkact
