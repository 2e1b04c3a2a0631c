#include "xcount/xcount.hpp"
#include "xcount/errors.hpp"
#include "xcount/pepin.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

namespace xcount {

namespace {

SubproblemSolution solve_one(const Ensemble& e, const GuardTable& gt, const SensitiveLayout& layout,
                             const std::vector<SensitiveMask>& masks, const Subproblem& sp, std::int64_t gap,
                             const BudgetPtr& budget) {
    const auto width = static_cast<std::uint32_t>(gt.num_vars());
    SubproblemSolution out;
    out.sp = sp;
    out.manager = std::make_shared<dd::Manager>(width, budget);
    {
        dd::Manager worker(width, budget);
        const dd::Bdd phi = process_subproblem(worker, e, gt, layout, masks[sp.mask1], masks[sp.mask2], gap);
        out.worker_nodes = worker.peak_nodes();
        out.phi = dd::transfer(phi, *out.manager);
    }
    out.t = solution_universe_size(out.phi, layout).t;
    return out;
}

} // namespace

void solve_subproblems(const Ensemble& e, const GuardTable& gt, const SensitiveLayout& layout,
                       const std::vector<SensitiveMask>& masks, const std::vector<Subproblem>& subproblems,
                       std::int64_t gap, unsigned jobs, const BudgetPtr& budget,
                       const std::function<void(std::size_t, SubproblemSolution&&)>& sink) {
    const std::size_t n = subproblems.size();
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t k = 0; k < n; ++k) {
            if (budget) budget->check_time();
            sink(k, solve_one(e, gt, layout, masks, subproblems[k], gap, budget));
        }
        return;
    }

    std::vector<std::optional<SubproblemSolution>> ready(n);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n || stop.load()) return;
            try {
                if (budget) budget->check_time();
                auto sol = solve_one(e, gt, layout, masks, subproblems[k], gap, budget);
                std::lock_guard lock(mu);
                ready[k] = std::move(sol);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);

    std::exception_ptr sink_failure;
    for (std::size_t k = 0; k < n; ++k) {
        std::optional<SubproblemSolution> sol;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return ready[k].has_value() || failure; });
            if (!ready[k]) break;
            sol = std::move(ready[k]);
            ready[k].reset();
        }
        try {
            sink(k, std::move(*sol));
        } catch (...) {
            sink_failure = std::current_exception();
            stop = true;
            break;
        }
    }
    for (auto& t : pool) t.join();
    if (sink_failure) std::rethrow_exception(sink_failure);
    if (failure) std::rethrow_exception(failure);
}

CountReport run_xcount(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q, const XCountOptions& opt) {
    const auto start = Clock::now();
    if (q.gap < 0) throw ConfigError("gap must be non-negative");
    const SensitiveLayout layout = SensitiveLayout::build(gt, q.sensitive);
    const auto masks = global_mask_set(gt, layout);
    const std::size_t d = std::min<std::size_t>(q.distance, layout.sensitive_vars.size());
    const auto subproblems = enumerate_subproblems(masks, d);

    CountReport report;
    report.seed = opt.seed;
    report.num_masks = masks.size();
    report.num_subproblems = subproblems.size();
    report.exact = opt.merge == MergeMode::Exact;
    if (layout.sensitive_vars.empty()) {
        report.warnings.push_back("no sensitive feature is tested by any guard; count is 0");
    }

    auto finish = [&] {
        report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        return report;
    };

    if (opt.merge == MergeMode::Exact) {
        ExactMerge merge(gt, layout, masks, opt.budget);
        solve_subproblems(e, gt, layout, masks, subproblems, q.gap, opt.jobs, opt.budget,
                          [&](std::size_t, SubproblemSolution&& sol) {
                              report.peak_nodes = std::max(report.peak_nodes, sol.worker_nodes);
                              if (sol.t == 0) return;
                              ++report.sat_subproblems;
                              merge.add(sol.phi, sol.sp);
                          });
        report.exact_count = merge.count();
        report.estimate = to_double(*report.exact_count);
        report.peak_nodes = std::max(report.peak_nodes, merge.manager().peak_nodes());
        return finish();
    }

    report.thresh = compute_thresh(opt.epsilon, opt.delta, std::max<std::size_t>(subproblems.size(), 1));
    if (subproblems.empty()) return finish();
    PepinSketch sketch(report.thresh, opt.seed);
    solve_subproblems(e, gt, layout, masks, subproblems, q.gap, opt.jobs, opt.budget,
                      [&](std::size_t k, SubproblemSolution&& sol) {
                          report.peak_nodes = std::max(report.peak_nodes, sol.worker_nodes);
                          if (sol.t == 0) return;
                          ++report.sat_subproblems;
                          sketch.process(sol.phi, sol.t, layout, sol.sp, k);
                      });
    report.estimate = sketch.estimate();
    report.final_p = sketch.p();
    return finish();
}

} // namespace xcount
