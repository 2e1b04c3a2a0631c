#pragma once

#include "xcount/bigint.hpp"
#include "xcount/dd.hpp"
#include "xcount/random.hpp"
#include "xcount/subproblems.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace xcount {

/// Sketch capacity max(12 ln(24/delta) / eps^2, 6 (ln(6/delta) + ln k)) for k
/// subproblems. Throws ConfigError unless eps, delta in (0, 1) and k >= 1.
double compute_thresh(double epsilon, double delta, std::size_t num_subproblems);

/// One sampled region: a non-sensitive assignment (indexed by guard variable,
/// sensitive positions zero) and the index of its mask.
struct SketchElement {
    dd::Assignment rest;
    std::uint32_t mask = 0;
};

/// Streaming union estimator over the region sets of the subproblems. X is a
/// multiset held at sampling probability p = 2^-level.
class PepinSketch {
public:
    PepinSketch(double thresh, std::uint64_t seed);

    /// Folds in the 2t regions {(s, mask1), (s, mask2) : s in Sol(phi)}. The
    /// random stream is derived from (seed, stream) so results do not depend
    /// on how the phi were produced.
    void process(dd::Bdd phi, const BigInt& t, const SensitiveLayout& layout, const Subproblem& sp,
                 std::uint64_t stream);

    /// |X| / p
    double estimate() const;
    double p() const;
    int level() const { return level_; }
    std::size_t size() const { return x_.size(); }
    double thresh() const { return thresh_; }
    const std::vector<SketchElement>& elements() const { return x_; }

private:
    void halve(Rng& rng);

    double thresh_;
    std::uint64_t seed_;
    int level_ = 0;
    std::vector<SketchElement> x_;
};

/// Exact union of the subproblem region sets over all guard variables.
class ExactMerge {
public:
    ExactMerge(const GuardTable& gt, const SensitiveLayout& layout, const std::vector<SensitiveMask>& masks,
               BudgetPtr budget = nullptr);

    void add(dd::Bdd phi, const Subproblem& sp);
    BigInt count() const;
    const dd::Manager& manager() const { return mgr_; }

private:
    const std::vector<SensitiveMask>& masks_;
    std::vector<dd::VarId> sensitive_ids_;
    std::vector<dd::VarId> all_ids_;
    dd::Manager mgr_;
    dd::Bdd acc_;
};

} // namespace xcount
