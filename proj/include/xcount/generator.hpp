#pragma once

#include "xcount/ensemble.hpp"

#include <cstddef>
#include <cstdint>

namespace xcount {

struct GenConfig {
    std::size_t trees = 5;
    std::size_t depth = 3;
    std::uint32_t features = 4;
    std::size_t guards_per_feature = 2;
    double leaf_min = -1.0;
    double leaf_max = 1.0;
    /// Leaves and thresholds are rounded to this many decimals so that
    /// quantizing at the same precision is exact.
    int decimals = 3;
    std::uint64_t seed = 1;
};

/// Random full binary trees of the given depth. Each feature gets its own
/// sorted list of distinct thresholds in (0, 1); every internal node picks a
/// feature and one of its thresholds uniformly. Throws ConfigError for
/// impossible parameters.
Ensemble generate_ensemble(const GenConfig& cfg);

} // namespace xcount
