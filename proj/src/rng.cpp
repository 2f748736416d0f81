#include "linkact/rng.hpp"

namespace linkact {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t link, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(splitmix64(seed) ^ link) ^ stream)) {}

double Stream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Stream::below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

}  // namespace linkact
