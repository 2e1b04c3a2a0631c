#pragma once

#include "xcount/bigint.hpp"
#include "xcount/ensemble.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xcount {

enum class Mode { Oracle, ExactAdd, XCountExactMerge, XCountPepin };

std::string to_string(Mode m);
/// Throws ConfigError for an unknown name.
Mode parse_mode(const std::string& name);

struct RunConfig {
    std::string model_path;
    std::vector<std::uint32_t> sensitive;
    /// Model units; scaled by 10^precision and floored.
    double gap = 2.0;
    std::uint32_t distance = 1;
    double epsilon = 0.1;
    double delta = 0.1;
    int precision = 3;
    std::uint64_t seed = 1;
    Mode mode = Mode::XCountPepin;
    /// 0 disables the limit.
    double timeout_s = 0.0;
    std::size_t memory_cap_mb = 0;
    unsigned jobs = 1;
    std::uint64_t oracle_cap = 1'000'000;
};

/// Throws ConfigError when a field is outside its domain.
void validate(const RunConfig& cfg);

/// Replaces memory_cap_mb with $XCOUNT_MEMORY_CAP_MB when that is set.
void apply_env_overrides(RunConfig& cfg);

struct RunReport {
    RunConfig config;
    std::string status = "ok";
    std::string error;
    /// Exact modes: the count. Pepin: the estimate rounded to nearest.
    std::optional<BigInt> count;
    double estimate = 0.0;
    bool exact = false;
    std::size_t num_subproblems = 0;
    std::size_t sat_subproblems = 0;
    double thresh = 0.0;
    double final_p = 1.0;
    double time_ms = 0.0;
    std::size_t peak_memory_bytes = 0;
    std::size_t peak_nodes = 0;
    std::uint64_t total_regions = 0;
    std::vector<std::string> warnings;

    /// Single-line JSON object.
    std::string to_json() const;
};

/// Runs one query on an already parsed (unquantized) ensemble. Errors are
/// thrown, not folded into the report.
RunReport run_query(const Ensemble& e, const RunConfig& cfg);

/// Loads, runs and reports. Writes exactly one JSON line to `out` and a
/// human summary to `err`. Returns 0, or 2 (parse), 3 (config or overflow),
/// 4 (timeout), 5 (memory cap).
int cmd_count(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace xcount
