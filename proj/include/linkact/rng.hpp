#pragma once

#include <cstdint>
#include <random>

namespace linkact {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Portable random stream: std::mt19937_64 (output sequence fixed by the
/// C++ standard) with an explicit 53-bit double conversion, so draws are
/// identical across standard libraries. std::uniform_real_distribution is
/// deliberately avoided because its algorithm is implementation-defined.
class Stream {
   public:
    /// Stream number `stream` of link `link` under master seed `seed`.
    Stream(std::uint64_t seed, std::uint64_t link, std::uint64_t stream);

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

   private:
    std::mt19937_64 engine_;
};

}  // namespace linkact
