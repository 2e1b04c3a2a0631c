#pragma once

#include "xcount/bigint.hpp"
#include "xcount/dd.hpp"
#include "xcount/ensemble.hpp"
#include "xcount/oracle.hpp"
#include "xcount/resources.hpp"
#include "xcount/subproblems.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xcount {

enum class MergeMode { Pepin, Exact };

struct XCountOptions {
    double epsilon = 0.1;
    double delta = 0.1;
    std::uint64_t seed = 1;
    MergeMode merge = MergeMode::Pepin;
    unsigned jobs = 1;
    BudgetPtr budget;
};

struct CountReport {
    double estimate = 0.0;
    /// Set by the exact merge.
    std::optional<BigInt> exact_count;
    bool exact = false;
    std::size_t num_masks = 0;
    std::size_t num_subproblems = 0;
    std::size_t sat_subproblems = 0;
    double thresh = 0.0;
    double final_p = 1.0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::size_t peak_nodes = 0;
    std::vector<std::string> warnings;
};

/// phi of one subproblem, kept in its own small manager.
struct SubproblemSolution {
    Subproblem sp;
    std::shared_ptr<dd::Manager> manager;
    dd::Bdd phi;
    BigInt t = 0;
    std::size_t worker_nodes = 0;
};

/// Builds phi for each subproblem (on `jobs` threads, one fresh manager per
/// subproblem) and hands the solutions to `sink` strictly in list order.
void solve_subproblems(const Ensemble& e, const GuardTable& gt, const SensitiveLayout& layout,
                       const std::vector<SensitiveMask>& masks, const std::vector<Subproblem>& subproblems,
                       std::int64_t gap, unsigned jobs, const BudgetPtr& budget,
                       const std::function<void(std::size_t, SubproblemSolution&&)>& sink);

/// Compositional counter. Expects a quantized ensemble; the query is in scaled
/// units.
CountReport run_xcount(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q, const XCountOptions& opt);

} // namespace xcount
