#pragma once

#include "xcount/bigint.hpp"
#include "xcount/dd.hpp"
#include "xcount/ensemble.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace xcount {

/// Suffix-ones block of one feature.
using MaskBlock = std::vector<std::uint8_t>;

/// The m+1 suffix-ones vectors of length m, from all zeros to all ones.
std::vector<MaskBlock> bitmask_gen(std::size_t m);

/// Which guard variables belong to sensitive features.
struct SensitiveLayout {
    std::vector<std::uint32_t> features;     // sorted, distinct
    std::vector<std::size_t> sensitive_vars; // guard-table order
    std::vector<std::size_t> rest_vars;      // guard-table order
    std::vector<std::uint32_t> rest_features;
    std::vector<std::int64_t> slot;          // var -> position in sensitive_vars, or -1

    /// Throws ConfigError for an empty list or an unknown feature.
    static SensitiveLayout build(const GuardTable& gt, std::span<const std::uint32_t> sensitive);

    bool is_sensitive_var(std::size_t v) const { return slot[v] >= 0; }
    std::vector<dd::VarId> rest_ids() const;
};

/// One assignment to every sensitive guard, indexed like
/// SensitiveLayout::sensitive_vars.
struct SensitiveMask {
    std::vector<std::uint8_t> bits;

    friend bool operator==(const SensitiveMask&, const SensitiveMask&) = default;
};

/// Cartesian product of the per-feature blocks, first sensitive feature
/// varying slowest.
std::vector<SensitiveMask> global_mask_set(const GuardTable& gt, const SensitiveLayout& layout);

std::size_t hamming_distance(const SensitiveMask& a, const SensitiveMask& b);

/// Ordered pair of indices into the global mask set.
struct Subproblem {
    std::size_t mask1 = 0;
    std::size_t mask2 = 0;

    friend bool operator==(const Subproblem&, const Subproblem&) = default;
};

/// All ordered pairs at Hamming distance 1..d, in lexicographic index order.
std::vector<Subproblem> enumerate_subproblems(const std::vector<SensitiveMask>& masks, std::size_t d);

/// Replaces every sensitive guard by the child selected by `mask`.
Tree prune_tree(const Tree& t, const GuardTable& gt, const SensitiveLayout& layout, const SensitiveMask& mask);

/// Boolean function over the non-sensitive guards (guard-table numbering in
/// `m`) that holds where the pruned ensembles satisfy V(mask1) - V(mask2) > gap,
/// conjoined with the non-sensitive monotonicity constraints.
dd::Bdd process_subproblem(dd::Manager& m, const Ensemble& e, const GuardTable& gt, const SensitiveLayout& layout,
                           const SensitiveMask& mask1, const SensitiveMask& mask2, std::int64_t gap);

struct UniverseSize {
    BigInt t = 0;
    BigInt regions = 0; // 2t: each solution pairs with either mask
};

UniverseSize solution_universe_size(dd::Bdd phi, const SensitiveLayout& layout);

} // namespace xcount
