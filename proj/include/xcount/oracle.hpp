#pragma once

#include "xcount/ensemble.hpp"
#include "xcount/resources.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace xcount {

/// A sensitivity query in scaled units: regions b and b' are partners when they
/// agree on every guard of a non-sensitive feature, differ in between 1 and
/// `distance` sensitive guard bits, and |V(b) - V(b')| > gap.
struct SensitivityQuery {
    std::vector<std::uint32_t> sensitive;
    std::uint32_t distance = 1;
    std::int64_t gap = 0;
};

struct RegionValue {
    RegionAssignment region;
    std::int64_t value = 0;
    bool sensitive = false;
};

struct OracleResult {
    std::uint64_t count = 0;
    std::uint64_t total_regions = 0;
    std::vector<RegionAssignment> sensitive_regions;
    /// Every valid region in enumeration order with its value.
    std::vector<RegionValue> regions;
};

/// Exhaustive enumeration over all valid regions. Throws ConfigError when the
/// region count exceeds `cap` or the query names an unknown feature.
OracleResult oracle_count(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q,
                          std::uint64_t cap = 1'000'000, const BudgetPtr& budget = nullptr);

/// Second, quadratic scan over all region pairs comparing raw bit vectors.
/// Only meant for small instances; shares nothing with oracle_count beyond
/// evaluate_region.
std::uint64_t oracle_count_pairwise(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q,
                                    std::uint64_t cap = 20'000);

/// CSV with one row per valid region: index, bit string, value, sensitive flag.
void write_region_csv(std::ostream& out, const OracleResult& r);

} // namespace xcount
