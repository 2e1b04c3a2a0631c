#include "xcount/bench.hpp"
#include "xcount/dd.hpp"
#include "xcount/encode.hpp"
#include "xcount/errors.hpp"
#include "xcount/generator.hpp"
#include "xcount/oracle.hpp"
#include "xcount/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int report_error(const std::exception& ex, int code) {
    std::cerr << "error: " << ex.what() << '\n';
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const xcount::ParseError& ex) {
        return report_error(ex, 2);
    } catch (const xcount::ConfigError& ex) {
        return report_error(ex, 3);
    } catch (const xcount::OverflowError& ex) {
        return report_error(ex, 3);
    } catch (const xcount::TimeoutError& ex) {
        return report_error(ex, 4);
    } catch (const xcount::MemoryLimitError& ex) {
        return report_error(ex, 5);
    } catch (const std::exception& ex) {
        return report_error(ex, 1);
    }
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw xcount::ConfigError("cannot write " + path);
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counts sensitive regions of decision-tree ensembles"};
    app.require_subcommand(1);

    xcount::RunConfig run;
    std::string mode_name = "xcount-pepin";
    auto* count = app.add_subcommand("count", "Count sensitive regions and print a JSON report");
    count->add_option("model", run.model_path, "Ensemble JSON file")->required();
    count->add_option("-s,--sensitive", run.sensitive, "Sensitive feature indices")->delimiter(',')->required();
    count->add_option("-g,--gap", run.gap, "Output gap in model units")->capture_default_str();
    count->add_option("-d,--distance", run.distance, "Maximum sensitive bit distance")->capture_default_str();
    count->add_option("-e,--epsilon", run.epsilon, "Tolerance")->capture_default_str();
    count->add_option("--delta", run.delta, "Confidence")->capture_default_str();
    count->add_option("-p,--precision", run.precision, "Leaf decimal precision")->capture_default_str();
    count->add_option("--seed", run.seed, "Random seed")->capture_default_str();
    count->add_option("-m,--mode", mode_name, "oracle | exact-add | xcount-exact-merge | xcount-pepin")
        ->capture_default_str();
    count->add_option("-t,--timeout", run.timeout_s, "Timeout in seconds (0: none)")->capture_default_str();
    count->add_option("--memory-cap-mb", run.memory_cap_mb, "Memory cap in MiB (0: none)")->capture_default_str();
    count->add_option("-j,--jobs", run.jobs, "Worker threads for subproblems")->capture_default_str();
    count->add_option("--oracle-cap", run.oracle_cap, "Region limit for the oracle")->capture_default_str();

    xcount::GenConfig gen;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random ensemble");
    gen_cmd->add_option("--trees", gen.trees)->capture_default_str();
    gen_cmd->add_option("--depth", gen.depth)->capture_default_str();
    gen_cmd->add_option("--features", gen.features)->capture_default_str();
    gen_cmd->add_option("--guards", gen.guards_per_feature, "Thresholds per feature")->capture_default_str();
    gen_cmd->add_option("--leaf-min", gen.leaf_min)->capture_default_str();
    gen_cmd->add_option("--leaf-max", gen.leaf_max)->capture_default_str();
    gen_cmd->add_option("--decimals", gen.decimals)->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
    gen_cmd->add_option("-o,--out", gen_out, "Output file (default stdout)");

    std::string matrix_path;
    std::string bench_out;
    std::string bench_summary;
    auto* bench = app.add_subcommand("bench", "Run a benchmark matrix");
    bench->add_option("matrix", matrix_path, "Matrix JSON")->required();
    bench->add_option("-o,--out", bench_out, "Per-instance CSV (default stdout)");
    bench->add_option("--summary", bench_summary, "PAR-2 CSV (default stderr)");

    xcount::RunConfig regions_cfg;
    auto* regions = app.add_subcommand("regions", "Dump every region with its value as CSV");
    regions->add_option("model", regions_cfg.model_path)->required();
    regions->add_option("-s,--sensitive", regions_cfg.sensitive)->delimiter(',')->required();
    regions->add_option("-g,--gap", regions_cfg.gap)->capture_default_str();
    regions->add_option("-d,--distance", regions_cfg.distance)->capture_default_str();
    regions->add_option("-p,--precision", regions_cfg.precision)->capture_default_str();
    regions->add_option("--oracle-cap", regions_cfg.oracle_cap)->capture_default_str();

    std::string dot_model;
    int dot_precision = 3;
    int dot_tree = -1;
    auto* dot = app.add_subcommand("dot", "Print the ensemble ADD in Graphviz format");
    dot->add_option("model", dot_model)->required();
    dot->add_option("-p,--precision", dot_precision)->capture_default_str();
    dot->add_option("--tree", dot_tree, "Single tree index (default: whole ensemble)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    if (count->parsed()) {
        return guarded([&] {
            run.mode = xcount::parse_mode(mode_name);
            xcount::apply_env_overrides(run);
            return xcount::cmd_count(run, std::cout, std::cerr);
        });
    }
    if (gen_cmd->parsed()) {
        return guarded([&] {
            const auto e = xcount::generate_ensemble(gen);
            std::ofstream file;
            open_output(gen_out, file) << xcount::to_json(e, 2) << '\n';
            return 0;
        });
    }
    if (bench->parsed()) {
        return guarded([&] {
            const auto matrix = xcount::BenchMatrix::load(matrix_path);
            const auto result = xcount::run_bench(matrix);
            std::ofstream file;
            xcount::write_bench_csv(open_output(bench_out, file), result.rows);
            if (bench_summary.empty()) {
                xcount::write_scores_csv(std::cerr, result.scores);
            } else {
                std::ofstream summary(bench_summary);
                if (!summary) throw xcount::ConfigError("cannot write " + bench_summary);
                xcount::write_scores_csv(summary, result.scores);
            }
            return 0;
        });
    }
    if (regions->parsed()) {
        return guarded([&] {
            xcount::validate(regions_cfg);
            const auto e = xcount::quantize_leaves(xcount::load_ensemble(regions_cfg.model_path),
                                                   regions_cfg.precision);
            const auto gt = xcount::build_guard_table(e);
            xcount::SensitivityQuery q;
            q.sensitive = regions_cfg.sensitive;
            q.distance = regions_cfg.distance;
            q.gap = xcount::scale_decimal_floor(regions_cfg.gap, regions_cfg.precision);
            const auto r = xcount::oracle_count(e, gt, q, regions_cfg.oracle_cap);
            xcount::write_region_csv(std::cout, r);
            return 0;
        });
    }
    return guarded([&] {
        const auto e = xcount::quantize_leaves(xcount::load_ensemble(dot_model), dot_precision);
        const auto gt = xcount::build_guard_table(e);
        xcount::dd::Manager m(static_cast<std::uint32_t>(gt.num_vars()));
        xcount::dd::Add a;
        if (dot_tree >= 0) {
            if (static_cast<std::size_t>(dot_tree) >= e.trees.size()) throw xcount::ConfigError("tree index out of range");
            a = xcount::tree_to_add(m, e.trees[static_cast<std::size_t>(dot_tree)], gt);
        } else {
            a = xcount::ensemble_to_add(m, e, gt);
        }
        const auto label = [&](xcount::dd::VarId v) {
            std::ostringstream s;
            s << 'f' << gt.feature_of(v.index) << " < " << gt.thresholds(gt.feature_of(v.index))[gt.position_of(v.index)];
            return s.str();
        };
        std::cout << xcount::dd::to_dot(a, label);
        return 0;
    });
}
