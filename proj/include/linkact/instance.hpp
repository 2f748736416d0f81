#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace linkact {

/// Square K x K matrix, row-major. For gains, `at(m, k)` is the gain from
/// the transmitter of link m to the receiver of link k.
class SquareMatrix {
   public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t k, double fill = 0.0) : k_(k), data_(k * k, fill) {}

    std::size_t size() const noexcept { return k_; }
    double& at(std::size_t m, std::size_t k) { return data_[m * k_ + k]; }
    double at(std::size_t m, std::size_t k) const { return data_[m * k_ + k]; }

    bool operator==(const SquareMatrix&) const = default;

   private:
    std::size_t k_ = 0;
    std::vector<double> data_;
};

using GainMatrix = SquareMatrix;

enum class Dataset { I, N };
enum class Density { sparse, dense };

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

/// Provenance carried alongside an instance. Not used by any computation.
struct InstanceMeta {
    std::string dataset;  // "I", "N", or free text
    std::string density;
    std::uint64_t seed = 0;
    double area_m = 0.0;
    std::vector<Point> tx;
    std::vector<Point> rx;
    bool operator==(const InstanceMeta&) const = default;
};

/// A link-activation problem. All quantities in linear scale and watts.
/// `thresholds` and `weights` are either empty (not yet assigned, as written
/// by the topology generator) or of length K.
struct Instance {
    std::size_t k = 0;
    GainMatrix gains;
    std::vector<double> powers;
    double noise = 0.0;
    std::vector<double> thresholds;
    std::vector<double> weights;
    std::optional<InstanceMeta> meta;

    bool has_thresholds() const noexcept { return thresholds.size() == k; }
    bool has_weights() const noexcept { return weights.size() == k; }

    /// Received power of transmitter m at receiver k, p_m * G_mk.
    double received(std::size_t m, std::size_t k) const { return powers[m] * gains.at(m, k); }
    /// Single-link SNR of link k.
    double snr(std::size_t k) const { return received(k, k) / noise; }

    bool operator==(const Instance&) const = default;
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const Instance& inst);
/// validate() plus thresholds and weights must be assigned.
void validate_complete(const Instance& inst);

/// Path-loss gain d^-alpha. Throws std::domain_error for d <= 0.
double gain_from_distance(double d, double alpha);
double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double ratio);

struct TopologySpec {
    Dataset dataset = Dataset::I;
    Density density = Density::sparse;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    double area_side = 1000.0;
    double pathloss_exponent = 4.0;
    double tx_power_dbm = 30.0;
    double noise_dbm = -100.0;
    double min_link_m = 3.0;
    double max_link_m = 200.0;
    double feasibility_threshold_db = 6.0;

    /// Defaults for a dataset/density cell: area 1000 m sparse, 500 m dense.
    static TopologySpec cell(Dataset dataset, Density density, std::size_t k, std::uint64_t seed);
};

/// Smallest single-link SNR (dB) the geometry admits: the area diagonal for
/// dataset I, max_link_m for dataset N.
double worst_case_snr_db(const TopologySpec& spec);

inline constexpr std::size_t kMaxPlacementRetries = 1'000'000;

/// Deterministic in `spec`. Each link draws from its own streams, so the
/// first j links of a K-link instance equal the j-link instance with the same
/// seed, and dataset-N link lengths do not depend on the area.
/// Throws GenerationError if a link cannot be placed within the retry bound.
Instance generate(const TopologySpec& spec);

std::string to_string(Dataset d);
std::string to_string(Density d);
Dataset parse_dataset(const std::string& s);
Density parse_density(const std::string& s);

/// JSON document; see docs/formats.md. Doubles written with 17 significant digits.
std::string dump_instance(const Instance& inst);
/// Throws ParseError naming the offending field.
Instance parse_instance(const std::string& text);

void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

/// Rate-based weight log2(1 + gamma) in b/s/Hz.
double rate_weight(double gamma_linear);

}  // namespace linkact
