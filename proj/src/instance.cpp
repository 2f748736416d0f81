#include "linkact/instance.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "linkact/errors.hpp"
#include "linkact/rng.hpp"

namespace linkact {

namespace {

struct Violation {
    std::string field;
    std::string message;
};

std::optional<Violation> find_violation(const Instance& inst, bool require_complete) {
    const std::size_t k = inst.k;
    if (inst.gains.size() != k) {
        return Violation{"gains", fmt::format("expected {}x{} matrix, got {}x{}", k, k,
                                              inst.gains.size(), inst.gains.size())};
    }
    if (inst.powers.size() != k) {
        return Violation{"powers_w", fmt::format("expected {} entries, got {}", k, inst.powers.size())};
    }
    if (!std::isfinite(inst.noise) || inst.noise <= 0.0) {
        return Violation{"noise_w", "must be finite and positive"};
    }
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t r = 0; r < k; ++r) {
            const double g = inst.gains.at(m, r);
            if (!std::isfinite(g) || g < 0.0 || (m == r && g <= 0.0)) {
                return Violation{fmt::format("gains[{}][{}]", m, r),
                                 m == r ? "direct gain must be finite and positive"
                                        : "gain must be finite and nonnegative"};
            }
        }
    }
    auto positive_vector = [&](const std::vector<double>& v, const char* name,
                               bool required) -> std::optional<Violation> {
        if (v.empty() && !required) return std::nullopt;
        if (v.size() != k) {
            return Violation{name, fmt::format("expected {} entries, got {}", k, v.size())};
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (!std::isfinite(v[i]) || v[i] <= 0.0) {
                return Violation{fmt::format("{}[{}]", name, i), "must be finite and positive"};
            }
        }
        return std::nullopt;
    };
    if (auto v = positive_vector(inst.powers, "powers_w", true)) return v;
    if (auto v = positive_vector(inst.thresholds, "thresholds_lin", require_complete)) return v;
    if (auto v = positive_vector(inst.weights, "weights", require_complete)) return v;
    return std::nullopt;
}

}  // namespace

void validate(const Instance& inst) {
    if (auto v = find_violation(inst, false)) {
        throw std::invalid_argument(v->field + ": " + v->message);
    }
}

void validate_complete(const Instance& inst) {
    if (auto v = find_violation(inst, true)) {
        throw std::invalid_argument(v->field + ": " + v->message);
    }
}

double gain_from_distance(double d, double alpha) {
    if (!(d > 0.0)) {
        throw std::domain_error(fmt::format("gain_from_distance: distance must be positive, got {}", d));
    }
    return std::pow(d, -alpha);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
double rate_weight(double gamma_linear) { return std::log2(1.0 + gamma_linear); }

TopologySpec TopologySpec::cell(Dataset dataset, Density density, std::size_t k, std::uint64_t seed) {
    TopologySpec s;
    s.dataset = dataset;
    s.density = density;
    s.k = k;
    s.seed = seed;
    s.area_side = density == Density::sparse ? 1000.0 : 500.0;
    return s;
}

double worst_case_snr_db(const TopologySpec& spec) {
    const double longest = spec.dataset == Dataset::I ? spec.area_side * std::numbers::sqrt2 : spec.max_link_m;
    return spec.tx_power_dbm - spec.noise_dbm - 10.0 * spec.pathloss_exponent * std::log10(longest);
}

namespace {

void validate_spec(const TopologySpec& spec) {
    if (spec.k == 0) throw std::invalid_argument("TopologySpec: k must be positive");
    if (!(spec.area_side > 0.0)) throw std::invalid_argument("TopologySpec: area_side must be positive");
    if (spec.dataset == Dataset::N) {
        const double diagonal = spec.area_side * std::numbers::sqrt2;
        if (!(spec.min_link_m > 0.0 && spec.min_link_m < spec.max_link_m && spec.max_link_m <= diagonal)) {
            throw std::invalid_argument("TopologySpec: need 0 < min_link_m < max_link_m <= area diagonal");
        }
    }
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum StreamTag : std::uint64_t { kPlacement = 0, kLength = 1 };

}  // namespace

Instance generate(const TopologySpec& spec) {
    validate_spec(spec);
    const std::size_t k = spec.k;
    const double side = spec.area_side;
    const double power = dbm_to_watts(spec.tx_power_dbm);
    const double noise = dbm_to_watts(spec.noise_dbm);

    InstanceMeta meta;
    meta.dataset = to_string(spec.dataset);
    meta.density = to_string(spec.density);
    meta.seed = spec.seed;
    meta.area_m = side;
    meta.tx.resize(k);
    meta.rx.resize(k);
    // Dataset N: direct gains come from the drawn length, not the rounded
    // coordinates, so link SNRs are bitwise identical across densities.
    std::vector<double> link_length(k, 0.0);

    for (std::size_t i = 0; i < k; ++i) {
        Stream placement(spec.seed, i, kPlacement);
        std::size_t tries = 0;
        if (spec.dataset == Dataset::I) {
            const double min_snr = db_to_linear(spec.feasibility_threshold_db);
            for (;; ++tries) {
                if (tries == kMaxPlacementRetries) {
                    throw GenerationError(fmt::format("dataset I: link {} not placed after {} tries", i, tries));
                }
                const Point tx{placement.uniform(0.0, side), placement.uniform(0.0, side)};
                const Point rx{placement.uniform(0.0, side), placement.uniform(0.0, side)};
                const double d = distance(tx, rx);
                if (d > 0.0 && power * gain_from_distance(d, spec.pathloss_exponent) / noise >= min_snr) {
                    meta.tx[i] = tx;
                    meta.rx[i] = rx;
                    break;
                }
            }
        } else {
            Stream length_stream(spec.seed, i, kLength);
            const double length = length_stream.uniform(spec.min_link_m, spec.max_link_m);
            link_length[i] = length;
            const Point tx{placement.uniform(0.0, side), placement.uniform(0.0, side)};
            for (;; ++tries) {
                if (tries == kMaxPlacementRetries) {
                    throw GenerationError(fmt::format("dataset N: link {} not placed after {} tries", i, tries));
                }
                const double angle = placement.uniform(0.0, 2.0 * std::numbers::pi);
                const Point rx{tx.x + length * std::cos(angle), tx.y + length * std::sin(angle)};
                if (rx.x >= 0.0 && rx.x <= side && rx.y >= 0.0 && rx.y <= side) {
                    meta.tx[i] = tx;
                    meta.rx[i] = rx;
                    break;
                }
            }
        }
    }

    Instance inst;
    inst.k = k;
    inst.gains = GainMatrix(k);
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t r = 0; r < k; ++r) {
            const double d = (m == r && link_length[m] > 0.0) ? link_length[m] : distance(meta.tx[m], meta.rx[r]);
            inst.gains.at(m, r) = gain_from_distance(d, spec.pathloss_exponent);
        }
    }
    inst.powers.assign(k, power);
    inst.noise = noise;
    inst.meta = std::move(meta);
    return inst;
}

std::string to_string(Dataset d) { return d == Dataset::I ? "I" : "N"; }
std::string to_string(Density d) { return d == Density::sparse ? "sparse" : "dense"; }

Dataset parse_dataset(const std::string& s) {
    if (s == "I" || s == "i") return Dataset::I;
    if (s == "N" || s == "n") return Dataset::N;
    throw std::invalid_argument("unknown dataset '" + s + "' (expected I or N)");
}

Density parse_density(const std::string& s) {
    if (s == "sparse") return Density::sparse;
    if (s == "dense") return Density::dense;
    throw std::invalid_argument("unknown density '" + s + "' (expected sparse or dense)");
}

// ---------------------------------------------------------------------------
// Serialization. Written by hand so every double carries 17 significant
// digits; parsed with nlohmann::json.

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_vector(std::ostringstream& out, const std::vector<double>& v) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << num(v[i]);
    out << ']';
}

void write_points(std::ostringstream& out, const std::vector<Point>& pts) {
    out << '[';
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out << (i ? ", " : "") << '[' << num(pts[i].x) << ", " << num(pts[i].y) << ']';
    }
    out << ']';
}

}  // namespace

std::string dump_instance(const Instance& inst) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"k\": " << inst.k << ",\n";
    out << "  \"noise_w\": " << num(inst.noise) << ",\n";
    out << "  \"powers_w\": ";
    write_vector(out, inst.powers);
    out << ",\n  \"thresholds_lin\": ";
    write_vector(out, inst.thresholds);
    out << ",\n  \"weights\": ";
    write_vector(out, inst.weights);
    out << ",\n  \"gains\": [";
    for (std::size_t m = 0; m < inst.k; ++m) {
        out << (m ? ",\n    [" : "\n    [");
        for (std::size_t r = 0; r < inst.k; ++r) out << (r ? ", " : "") << num(inst.gains.at(m, r));
        out << ']';
    }
    out << (inst.k ? "\n  ]" : "]");
    if (inst.meta) {
        const InstanceMeta& m = *inst.meta;
        out << ",\n  \"meta\": {\n";
        out << "    \"dataset\": " << nlohmann::json(m.dataset).dump() << ",\n";
        out << "    \"density\": " << nlohmann::json(m.density).dump() << ",\n";
        out << "    \"seed\": " << m.seed << ",\n";
        out << "    \"area_m\": " << num(m.area_m) << ",\n";
        out << "    \"coords\": {\n      \"tx\": ";
        write_points(out, m.tx);
        out << ",\n      \"rx\": ";
        write_points(out, m.rx);
        out << "\n    }\n  }";
    }
    out << "\n}\n";
    return out.str();
}

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* field) {
    auto it = doc.find(field);
    if (it == doc.end()) throw ParseError(field, "missing field");
    return *it;
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ParseError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(field, "non-finite number");
    return d;
}

std::vector<double> as_vector(const json& v, const std::string& field) {
    if (!v.is_array()) throw ParseError(field, "expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], fmt::format("{}[{}]", field, i)));
    return out;
}

std::vector<Point> as_points(const json& v, const std::string& field) {
    if (!v.is_array()) throw ParseError(field, "expected an array of [x, y]");
    std::vector<Point> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto name = fmt::format("{}[{}]", field, i);
        if (!v[i].is_array() || v[i].size() != 2) throw ParseError(name, "expected [x, y]");
        out.push_back({as_number(v[i][0], name), as_number(v[i][1], name)});
    }
    return out;
}

}  // namespace

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("document", e.what());
    }
    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");

    Instance inst;
    const json& k = require(doc, "k");
    if (!k.is_number_unsigned()) throw ParseError("k", "expected a nonnegative integer");
    inst.k = k.get<std::size_t>();
    inst.noise = as_number(require(doc, "noise_w"), "noise_w");
    inst.powers = as_vector(require(doc, "powers_w"), "powers_w");
    inst.thresholds = doc.contains("thresholds_lin") ? as_vector(doc["thresholds_lin"], "thresholds_lin")
                                                     : std::vector<double>{};
    inst.weights = doc.contains("weights") ? as_vector(doc["weights"], "weights") : std::vector<double>{};

    const json& rows = require(doc, "gains");
    if (!rows.is_array() || rows.size() != inst.k) {
        throw ParseError("gains", fmt::format("dimension mismatch: expected {} rows, got {}", inst.k,
                                              rows.is_array() ? rows.size() : 0));
    }
    inst.gains = GainMatrix(inst.k);
    for (std::size_t m = 0; m < inst.k; ++m) {
        const auto row = as_vector(rows[m], fmt::format("gains[{}]", m));
        if (row.size() != inst.k) {
            throw ParseError(fmt::format("gains[{}]", m),
                             fmt::format("dimension mismatch: expected {} columns, got {}", inst.k, row.size()));
        }
        for (std::size_t r = 0; r < inst.k; ++r) inst.gains.at(m, r) = row[r];
    }

    if (auto it = doc.find("meta"); it != doc.end() && !it->is_null()) {
        const json& mj = *it;
        if (!mj.is_object()) throw ParseError("meta", "expected an object");
        InstanceMeta meta;
        auto text_field = [&](const char* name, const std::string& field) {
            if (!mj.contains(name)) return std::string{};
            if (!mj[name].is_string()) throw ParseError(field, "expected a string");
            return mj[name].get<std::string>();
        };
        meta.dataset = text_field("dataset", "meta.dataset");
        meta.density = text_field("density", "meta.density");
        if (mj.contains("seed")) {
            if (!mj["seed"].is_number_unsigned()) throw ParseError("meta.seed", "expected a nonnegative integer");
            meta.seed = mj["seed"].get<std::uint64_t>();
        }
        if (mj.contains("area_m")) meta.area_m = as_number(mj["area_m"], "meta.area_m");
        if (mj.contains("coords")) {
            const json& c = mj["coords"];
            if (c.contains("tx")) meta.tx = as_points(c["tx"], "meta.coords.tx");
            if (c.contains("rx")) meta.rx = as_points(c["rx"], "meta.coords.rx");
        }
        inst.meta = std::move(meta);
    }

    if (auto v = find_violation(inst, false)) throw ParseError(v->field, v->message);
    return inst;
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << dump_instance(inst);
    if (!out) throw IoError("write failed: " + path.string());
}

Instance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

}  // namespace linkact
