#include "xcount/exact_counter.hpp"
#include "xcount/dd.hpp"
#include "xcount/encode.hpp"
#include "xcount/errors.hpp"

#include <algorithm>

namespace xcount {

ExactResult exact_count(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q,
                        const BudgetPtr& budget) {
    if (q.gap < 0) throw ConfigError("gap must be non-negative");
    std::vector<bool> is_sensitive(gt.num_features(), false);
    for (const auto f : q.sensitive) {
        if (f >= gt.num_features()) throw ConfigError("sensitive feature " + std::to_string(f) + " out of range");
        is_sensitive[f] = true;
    }

    ExactResult out;
    std::size_t sensitive_vars = 0;
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) {
        if (is_sensitive[f]) sensitive_vars += gt.count(f);
    }
    if (sensitive_vars == 0) {
        out.warnings.push_back("no sensitive feature is tested by any guard; count is 0");
        return out;
    }

    // Interleaved order: each primed sensitive guard sits right after its twin.
    std::vector<dd::VarId> unprimed(gt.num_vars());
    std::vector<dd::VarId> primed(gt.num_vars());
    std::uint32_t next = 0;
    for (std::size_t v = 0; v < gt.num_vars(); ++v) {
        unprimed[v] = dd::VarId{next++};
        if (is_sensitive[gt.feature_of(v)]) primed[v] = dd::VarId{next++};
    }

    dd::Manager m(next, budget);
    std::vector<dd::VarId> sens_a;
    std::vector<dd::VarId> sens_b;
    dd::VarMap rename;
    for (std::size_t v = 0; v < gt.num_vars(); ++v) {
        if (!is_sensitive[gt.feature_of(v)]) continue;
        sens_a.push_back(unprimed[v]);
        sens_b.push_back(primed[v]);
        rename.emplace_back(unprimed[v], primed[v]);
    }

    const dd::Add a1 = ensemble_to_add(m, e, gt, unprimed);
    const dd::Add a2 = dd::substitute_vars(a1, rename);
    const dd::Add delta = a2 - a1;
    dd::Bdd b = dd::threshold_to_bdd(delta, q.gap, dd::ThresholdMode::AbsGreater);

    const auto d = static_cast<std::uint32_t>(std::min<std::size_t>(q.distance, sensitive_vars));
    b = b & dd::at_most_distance(m, sens_a, sens_b, d);
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) {
        b = b & monotone_constraint(m, gt, f, unprimed);
        if (is_sensitive[f]) b = b & monotone_constraint(m, gt, f, primed);
    }
    const dd::Bdd projected = dd::exists_project(b, sens_b);
    out.count = dd::count_models(projected, unprimed);
    out.peak_nodes = m.peak_nodes();
    return out;
}

} // namespace xcount
