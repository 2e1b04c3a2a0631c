#include "xcount/pepin.hpp"
#include "xcount/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace xcount {

double compute_thresh(double epsilon, double delta, std::size_t num_subproblems) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (num_subproblems == 0) throw ConfigError("no subproblems to merge");
    const double first = 12.0 * std::log(24.0 / delta) / (epsilon * epsilon);
    const double second = 6.0 * (std::log(6.0 / delta) + std::log(static_cast<double>(num_subproblems)));
    return std::max(first, second);
}

PepinSketch::PepinSketch(double thresh, std::uint64_t seed) : thresh_(thresh), seed_(seed) {
    if (!(thresh >= 1.0)) throw ConfigError("sketch threshold must be at least 1");
}

double PepinSketch::p() const { return std::ldexp(1.0, -level_); }

double PepinSketch::estimate() const { return std::ldexp(static_cast<double>(x_.size()), level_); }

void PepinSketch::halve(Rng& rng) {
    std::erase_if(x_, [&](const SketchElement&) { return !coin(rng); });
    ++level_;
}

void PepinSketch::process(dd::Bdd phi, const BigInt& t, const SensitiveLayout& layout, const Subproblem& sp,
                          std::uint64_t stream) {
    if (t == 0) return;
    Rng rng(derive_seed(seed_, stream));

    // Regions already held are re-drawn below at the current rate.
    std::erase_if(x_, [&](const SketchElement& e) {
        return (e.mask == sp.mask1 || e.mask == sp.mask2) && dd::evaluate(phi, e.rest);
    });

    // Binomial thinning of Poisson(mu) is Poisson(mu / 2), so levels at which
    // the draw would certainly overflow the sketch are passed without drawing.
    const BigInt universe = t * 2;
    const BigInt skip_above(static_cast<std::uint64_t>(std::ceil(64.0 * thresh_)));
    while ((universe >> level_) > skip_above) halve(rng);

    const double mean = std::ldexp(to_double(universe), -level_);
    std::uint64_t n = poisson(rng, mean);
    while (static_cast<double>(n) + static_cast<double>(x_.size()) >= thresh_) {
        halve(rng);
        n = binomial_half(rng, n);
    }
    if (static_cast<double>(n + x_.size()) >= thresh_) throw std::logic_error("sketch exceeds its threshold");
    if (n == 0) return;

    const dd::SolutionSampler sampler(phi, layout.rest_ids());
    const auto width = phi.manager().num_vars();
    for (std::uint64_t i = 0; i < n; ++i) {
        SketchElement e;
        e.rest.assign(width, 0);
        sampler.draw(rng, e.rest);
        e.mask = static_cast<std::uint32_t>(coin(rng) ? sp.mask2 : sp.mask1);
        x_.push_back(std::move(e));
    }
}

ExactMerge::ExactMerge(const GuardTable& gt, const SensitiveLayout& layout, const std::vector<SensitiveMask>& masks,
                       BudgetPtr budget)
    : masks_(masks), mgr_(static_cast<std::uint32_t>(gt.num_vars()), std::move(budget)) {
    for (const auto v : layout.sensitive_vars) sensitive_ids_.push_back(dd::VarId{static_cast<std::uint32_t>(v)});
    for (std::uint32_t v = 0; v < gt.num_vars(); ++v) all_ids_.push_back(dd::VarId{v});
    acc_ = mgr_.bdd_false();
}

void ExactMerge::add(dd::Bdd phi, const Subproblem& sp) {
    if (phi.is_false()) return;
    const dd::Bdd local = dd::transfer(phi, mgr_);
    const dd::Bdd either = dd::cube(mgr_, sensitive_ids_, masks_.at(sp.mask1).bits) |
                           dd::cube(mgr_, sensitive_ids_, masks_.at(sp.mask2).bits);
    acc_ = acc_ | (local & either);
}

BigInt ExactMerge::count() const { return dd::count_models(acc_, all_ids_); }

} // namespace xcount
