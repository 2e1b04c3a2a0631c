#include "xcount/bench.hpp"
#include "xcount/errors.hpp"
#include "xcount/resources.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <new>
#include <ostream>
#include <sstream>

namespace xcount {

BenchMatrix BenchMatrix::parse(const std::string& document, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(document);
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bench matrix: ") + ex.what());
    }
    if (!j.is_object()) throw ParseError("bench matrix must be an object");
    BenchMatrix m;
    try {
        for (const auto& name : j.value("modes", nlohmann::json::array())) m.modes.push_back(parse_mode(name));
        auto& d = m.defaults;
        d.timeout_s = j.value("timeout_s", 1800.0);
        d.memory_cap_mb = j.value("memory_cap_mb", std::size_t{4096});
        d.seed = j.value("seed", std::uint64_t{1});
        d.epsilon = j.value("epsilon", 0.1);
        d.delta = j.value("delta", 0.1);
        d.precision = j.value("precision", 3);
        d.jobs = j.value("jobs", 1u);
        for (const auto& inst : j.value("instances", nlohmann::json::array())) {
            BenchInstance b;
            std::filesystem::path p = inst.at("model").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
            b.model = p.string();
            b.sensitive = inst.value("sensitive", std::vector<std::uint32_t>{0});
            b.gap = inst.value("gap", 2.0);
            b.distance = inst.value("distance", 1u);
            m.instances.push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bench matrix: ") + ex.what());
    }
    return m;
}

BenchMatrix BenchMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open bench matrix " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), std::filesystem::path(path).parent_path().string());
}

double par2(const std::vector<double>& seconds, const std::vector<bool>& solved, double timeout_s) {
    if (seconds.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < seconds.size(); ++i) sum += solved[i] ? seconds[i] : 2.0 * timeout_s;
    return sum / static_cast<double>(seconds.size());
}

BenchResult run_bench(const BenchMatrix& matrix) {
    BenchResult result;
    for (const Mode mode : matrix.modes) {
        std::vector<double> seconds;
        std::vector<bool> solved;
        for (const auto& inst : matrix.instances) {
            RunConfig cfg = matrix.defaults;
            cfg.mode = mode;
            cfg.model_path = inst.model;
            cfg.sensitive = inst.sensitive;
            cfg.gap = inst.gap;
            cfg.distance = inst.distance;

            BenchRow row;
            row.mode = mode;
            row.instance = inst.model;
            const auto start = Clock::now();
            try {
                const Ensemble e = load_ensemble(inst.model);
                row.trees = e.trees.size();
                row.depth = e.max_depth();
                row.guards = build_guard_table(e).num_vars();
                const RunReport r = run_query(e, cfg);
                row.count = r.count ? r.count->str() : "";
                row.estimate = r.estimate;
                row.status = r.status;
            } catch (const ParseError&) {
                row.status = "parse_error";
            } catch (const ConfigError&) {
                row.status = "config_error";
            } catch (const OverflowError&) {
                row.status = "overflow";
            } catch (const TimeoutError&) {
                row.status = "timeout";
            } catch (const MemoryLimitError&) {
                row.status = "memout";
            } catch (const std::bad_alloc&) {
                row.status = "memout";
            } catch (const std::exception&) {
                row.status = "error";
            }
            row.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            seconds.push_back(row.time_ms / 1000.0);
            solved.push_back(row.status == "ok");
            result.rows.push_back(std::move(row));
        }
        ModeScore score;
        score.mode = mode;
        score.total = seconds.size();
        for (const bool s : solved) score.solved += s ? 1 : 0;
        score.par2_s = par2(seconds, solved, matrix.defaults.timeout_s);
        result.scores.push_back(score);
    }
    return result;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "mode,instance,trees,depth,guards,time_ms,count,estimate,status\n";
    for (const auto& r : rows) {
        out << to_string(r.mode) << ',' << r.instance << ',' << r.trees << ',' << r.depth << ',' << r.guards << ','
            << std::fixed << std::setprecision(3) << r.time_ms << ',' << r.count << ',' << std::setprecision(6)
            << r.estimate << ',' << r.status << '\n';
        out.unsetf(std::ios::floatfield);
    }
}

void write_scores_csv(std::ostream& out, const std::vector<ModeScore>& scores) {
    out << "mode,solved,total,par2_s\n";
    for (const auto& s : scores) {
        out << to_string(s.mode) << ',' << s.solved << ',' << s.total << ',' << std::fixed << std::setprecision(3)
            << s.par2_s << '\n';
        out.unsetf(std::ios::floatfield);
    }
}

} // namespace xcount
