#include "xcount/random.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xcount {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

std::uint64_t poisson_inversion(Rng& rng, double mean) {
    const double limit = std::exp(-mean);
    double prod = uniform01(rng);
    std::uint64_t k = 0;
    while (prod > limit) {
        prod *= uniform01(rng);
        ++k;
    }
    return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson
// random variables" (PTRS).
std::uint64_t poisson_ptrs(Rng& rng, double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = uniform01(rng) - 0.5;
        const double v = uniform01(rng);
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

} // namespace

std::uint64_t poisson(Rng& rng, double mean) {
    if (!(mean >= 0.0) || mean > 0x1.0p52) throw std::domain_error("poisson mean out of range");
    if (mean == 0.0) return 0;
    return mean < 10.0 ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

std::uint64_t binomial_half(Rng& rng, std::uint64_t n) {
    std::uint64_t total = 0;
    for (; n >= 64; n -= 64) total += static_cast<std::uint64_t>(std::popcount(rng()));
    if (n > 0) total += static_cast<std::uint64_t>(std::popcount(rng() >> (64 - n)));
    return total;
}

BigInt uniform_below(Rng& rng, const BigInt& bound) {
    if (bound <= 0) throw std::domain_error("uniform_below needs a positive bound");
    if (bound <= BigInt(std::numeric_limits<std::uint64_t>::max())) {
        const auto n = bound.convert_to<std::uint64_t>();
        // Rejection on the smallest covering power of two.
        const int bits = 64 - std::countl_zero(n - 1 == 0 ? 1ULL : n - 1);
        const std::uint64_t mask = bits >= 64 ? ~0ULL : ((1ULL << bits) - 1);
        for (;;) {
            const std::uint64_t r = rng() & mask;
            if (r < n) return BigInt(r);
        }
    }
    const std::size_t bits = boost::multiprecision::msb(bound - 1) + 1;
    const std::size_t words = (bits + 63) / 64;
    const unsigned top_bits = static_cast<unsigned>(bits - (words - 1) * 64);
    for (;;) {
        BigInt r = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t word = rng();
            if (w == 0 && top_bits < 64) word >>= (64 - top_bits);
            r <<= 64;
            r += word;
        }
        if (r < bound) return r;
    }
}

} // namespace xcount
