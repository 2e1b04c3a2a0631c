#include "xcount/run.hpp"
#include "xcount/errors.hpp"
#include "xcount/exact_counter.hpp"
#include "xcount/oracle.hpp"
#include "xcount/resources.hpp"
#include "xcount/xcount.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <new>
#include <ostream>

namespace xcount {

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Oracle: return "oracle";
    case Mode::ExactAdd: return "exact-add";
    case Mode::XCountExactMerge: return "xcount-exact-merge";
    case Mode::XCountPepin: return "xcount-pepin";
    }
    return "unknown";
}

Mode parse_mode(const std::string& name) {
    for (const Mode m : {Mode::Oracle, Mode::ExactAdd, Mode::XCountExactMerge, Mode::XCountPepin}) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown mode '" + name + "'");
}

void validate(const RunConfig& cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (cfg.precision < 0 || cfg.precision > 9) throw ConfigError("precision must lie in [0, 9]");
    if (cfg.sensitive.empty()) throw ConfigError("at least one sensitive feature is required");
    if (!std::isfinite(cfg.gap) || cfg.gap < 0.0) throw ConfigError("gap must be a finite non-negative number");
    if (!(cfg.timeout_s >= 0.0) || !std::isfinite(cfg.timeout_s)) throw ConfigError("timeout must be non-negative");
    if (cfg.jobs == 0) throw ConfigError("jobs must be at least 1");
}

void apply_env_overrides(RunConfig& cfg) {
    const char* env = std::getenv("XCOUNT_MEMORY_CAP_MB");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const unsigned long long mb = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError("XCOUNT_MEMORY_CAP_MB must be an integer");
    cfg.memory_cap_mb = static_cast<std::size_t>(mb);
}

namespace {

nlohmann::json count_json(const BigInt& c) {
    if (c >= std::numeric_limits<std::int64_t>::min() && c <= std::numeric_limits<std::int64_t>::max()) {
        return c.convert_to<std::int64_t>();
    }
    return c.str();
}

} // namespace

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["mode"] = xcount::to_string(config.mode);
    j["count"] = count ? count_json(*count) : nlohmann::json(nullptr);
    j["estimate"] = estimate;
    j["exact"] = exact;
    j["num_subproblems"] = num_subproblems;
    j["sat_subproblems"] = sat_subproblems;
    j["thresh"] = thresh;
    j["final_p"] = final_p;
    j["seed"] = config.seed;
    j["time_ms"] = time_ms;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["peak_memory_bytes"] = peak_memory_bytes;
    j["peak_nodes"] = peak_nodes;
    j["total_regions"] = total_regions;
    j["warnings"] = warnings;
    j["config"] = {
        {"model", config.model_path},   {"sensitive", config.sensitive}, {"gap", config.gap},
        {"distance", config.distance},  {"epsilon", config.epsilon},     {"delta", config.delta},
        {"precision", config.precision}, {"timeout_s", config.timeout_s}, {"memory_cap_mb", config.memory_cap_mb},
        {"jobs", config.jobs},
    };
    return j.dump();
}

RunReport run_query(const Ensemble& raw, const RunConfig& cfg) {
    validate(cfg);
    const auto start = Clock::now();
    RunReport report;
    report.config = cfg;

    const Ensemble e = quantize_leaves(raw, cfg.precision);
    const GuardTable gt = build_guard_table(e);
    for (const auto f : cfg.sensitive) {
        if (f >= e.num_features) throw ConfigError("sensitive feature " + std::to_string(f) + " out of range");
    }
    SensitivityQuery q;
    q.sensitive = cfg.sensitive;
    q.distance = cfg.distance;
    q.gap = scale_decimal_floor(cfg.gap, cfg.precision);
    report.total_regions = gt.num_regions();

    auto budget = make_budget(ResourceLimits::from_seconds(cfg.timeout_s, cfg.memory_cap_mb * (1ULL << 20)));

    switch (cfg.mode) {
    case Mode::Oracle: {
        const auto r = oracle_count(e, gt, q, cfg.oracle_cap, budget);
        report.count = BigInt(r.count);
        report.estimate = static_cast<double>(r.count);
        report.exact = true;
        break;
    }
    case Mode::ExactAdd: {
        auto r = exact_count(e, gt, q, budget);
        report.count = r.count;
        report.estimate = to_double(r.count);
        report.exact = true;
        report.peak_nodes = r.peak_nodes;
        report.warnings = std::move(r.warnings);
        break;
    }
    case Mode::XCountExactMerge:
    case Mode::XCountPepin: {
        XCountOptions opt;
        opt.epsilon = cfg.epsilon;
        opt.delta = cfg.delta;
        opt.seed = cfg.seed;
        opt.jobs = cfg.jobs;
        opt.budget = budget;
        opt.merge = cfg.mode == Mode::XCountPepin ? MergeMode::Pepin : MergeMode::Exact;
        auto r = run_xcount(e, gt, q, opt);
        report.exact = r.exact;
        report.estimate = r.estimate;
        report.count = r.exact_count ? *r.exact_count : BigInt(std::round(r.estimate));
        report.num_subproblems = r.num_subproblems;
        report.sat_subproblems = r.sat_subproblems;
        report.thresh = r.thresh;
        report.final_p = r.final_p;
        report.peak_nodes = r.peak_nodes;
        report.warnings = std::move(r.warnings);
        break;
    }
    }
    report.peak_memory_bytes = budget->peak_bytes();
    report.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return report;
}

int cmd_count(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    RunReport report;
    report.config = cfg;
    int code = 0;
    try {
        const Ensemble e = load_ensemble(cfg.model_path);
        report = run_query(e, cfg);
    } catch (const ParseError& ex) {
        report.status = "parse_error";
        report.error = ex.what();
        code = 2;
    } catch (const ConfigError& ex) {
        report.status = "config_error";
        report.error = ex.what();
        code = 3;
    } catch (const OverflowError& ex) {
        report.status = "overflow";
        report.error = ex.what();
        code = 3;
    } catch (const TimeoutError& ex) {
        report.status = "timeout";
        report.error = ex.what();
        code = 4;
    } catch (const MemoryLimitError& ex) {
        report.status = "memout";
        report.error = ex.what();
        code = 5;
    } catch (const std::bad_alloc&) {
        report.status = "memout";
        report.error = "allocation failed";
        code = 5;
    } catch (const std::exception& ex) {
        report.status = "error";
        report.error = ex.what();
        code = 1;
    }
    out << report.to_json() << '\n';
    if (code == 0) {
        err << to_string(report.config.mode) << ": count " << (report.count ? report.count->str() : "-")
            << " (estimate " << report.estimate << ") in " << report.time_ms << " ms";
        if (report.num_subproblems > 0) {
            err << ", " << report.sat_subproblems << '/' << report.num_subproblems << " subproblems satisfiable";
        }
        err << '\n';
        for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    } else {
        err << "error (" << report.status << "): " << report.error << '\n';
    }
    return code;
}

} // namespace xcount
