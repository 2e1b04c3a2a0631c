#pragma once

#include "xcount/bigint.hpp"
#include "xcount/ensemble.hpp"
#include "xcount/oracle.hpp"
#include "xcount/resources.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace xcount {

struct ExactResult {
    BigInt count = 0;
    std::vector<std::string> warnings;
    std::size_t peak_nodes = 0;
};

/// Monolithic baseline: one ADD for the ensemble, a primed copy of the
/// sensitive guards, the thresholded two-sided difference conjoined with the
/// distance and monotonicity constraints, and a projected model count over the
/// unprimed guards. Expects a quantized ensemble.
ExactResult exact_count(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q,
                        const BudgetPtr& budget = nullptr);

} // namespace xcount
