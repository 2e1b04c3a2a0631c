#pragma once

#include "xcount/run.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace xcount {

struct BenchInstance {
    std::string model;
    std::vector<std::uint32_t> sensitive;
    double gap = 2.0;
    std::uint32_t distance = 1;
};

/// Matrix document:
/// {"modes": [...], "instances": [{"model", "sensitive", "gap", "distance"}],
///  "timeout_s", "memory_cap_mb", "seed", "epsilon", "delta", "precision", "jobs"}
/// Relative model paths are resolved against `base_dir`.
struct BenchMatrix {
    std::vector<Mode> modes;
    std::vector<BenchInstance> instances;
    RunConfig defaults;

    static BenchMatrix parse(const std::string& document, const std::string& base_dir = "");
    static BenchMatrix load(const std::string& path);
};

struct BenchRow {
    Mode mode = Mode::XCountPepin;
    std::string instance;
    std::size_t trees = 0;
    std::size_t depth = 0;
    std::size_t guards = 0;
    double time_ms = 0.0;
    std::string count;
    double estimate = 0.0;
    std::string status;
};

struct ModeScore {
    Mode mode = Mode::XCountPepin;
    std::size_t solved = 0;
    std::size_t total = 0;
    /// Mean runtime in seconds with unsolved cells charged twice the timeout.
    double par2_s = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<ModeScore> scores;
};

/// Runs every (mode, instance) cell; failures become row statuses.
BenchResult run_bench(const BenchMatrix& matrix);

/// PAR-2 over per-cell runtimes (seconds); unsolved cells count 2 * timeout.
double par2(const std::vector<double>& seconds, const std::vector<bool>& solved, double timeout_s);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_scores_csv(std::ostream& out, const std::vector<ModeScore>& scores);

} // namespace xcount
