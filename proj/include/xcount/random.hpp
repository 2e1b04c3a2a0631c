#pragma once

#include "xcount/bigint.hpp"

#include <cstdint>
#include <random>

namespace xcount {

/// mt19937_64 is fully specified by the standard, so seeded streams are
/// reproducible across platforms. The distributions below are implemented
/// here for the same reason (std:: distributions are implementation-defined).
using Rng = std::mt19937_64;

/// splitmix64 finalizer applied to (root, stream); used to give every
/// subproblem an independent stream.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// Uniform in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Fair coin.
inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

/// Poisson(mean). Sequential inversion below mean 10, Hormann's PTRS
/// transformed rejection above. Requires 0 <= mean <= 2^52.
std::uint64_t poisson(Rng& rng, double mean);

/// Binomial(n, 1/2), computed exactly as the popcount of n random bits.
std::uint64_t binomial_half(Rng& rng, std::uint64_t n);

/// Uniform integer in [0, bound). Requires bound > 0.
BigInt uniform_below(Rng& rng, const BigInt& bound);

} // namespace xcount
