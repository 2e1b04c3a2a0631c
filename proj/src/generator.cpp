#include "xcount/generator.hpp"
#include "xcount/errors.hpp"
#include "xcount/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace xcount {

namespace {

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return uniform_below(rng, BigInt(n)).convert_to<std::uint64_t>();
}

double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

} // namespace

Ensemble generate_ensemble(const GenConfig& cfg) {
    if (cfg.trees == 0) throw ConfigError("trees must be at least 1");
    if (cfg.features == 0) throw ConfigError("features must be at least 1");
    if (cfg.depth > 20) throw ConfigError("depth must be at most 20");
    if (cfg.decimals < 1 || cfg.decimals > 9) throw ConfigError("decimals must lie in [1, 9]");
    if (cfg.depth >= 1 && cfg.guards_per_feature == 0) {
        throw ConfigError("guards_per_feature must be at least 1 when depth is at least 1");
    }
    const double grid = std::pow(10.0, cfg.decimals);
    if (static_cast<double>(cfg.guards_per_feature) > grid - 1.0) {
        throw ConfigError("too many guards per feature for the threshold grid");
    }
    if (!(cfg.leaf_min <= cfg.leaf_max) || !std::isfinite(cfg.leaf_min) || !std::isfinite(cfg.leaf_max)) {
        throw ConfigError("leaf range must be a finite interval");
    }

    Rng rng(cfg.seed);
    std::vector<std::vector<double>> thresholds(cfg.features);
    for (auto& list : thresholds) {
        std::set<std::uint64_t> ticks;
        while (ticks.size() < cfg.guards_per_feature) {
            ticks.insert(1 + uniform_index(rng, static_cast<std::uint64_t>(grid) - 1));
        }
        for (const auto t : ticks) list.push_back(static_cast<double>(t) / grid);
    }

    Ensemble e;
    e.num_features = cfg.features;
    for (std::size_t k = 0; k < cfg.trees; ++k) {
        Tree t;
        auto grow = [&](auto&& self, std::size_t level) -> std::int32_t {
            const auto at = static_cast<std::int32_t>(t.nodes.size());
            t.nodes.emplace_back();
            if (level == cfg.depth) {
                const double v = cfg.leaf_min + (cfg.leaf_max - cfg.leaf_min) * uniform01(rng);
                t.nodes[static_cast<std::size_t>(at)].value = round_to(v, cfg.decimals) + 0.0;
                return at;
            }
            const auto f = static_cast<std::uint32_t>(uniform_index(rng, cfg.features));
            const auto i = uniform_index(rng, thresholds[f].size());
            const std::int32_t yes = self(self, level + 1);
            const std::int32_t no = self(self, level + 1);
            auto& n = t.nodes[static_cast<std::size_t>(at)];
            n.guard = Guard{f, thresholds[f][i]};
            n.yes = yes;
            n.no = no;
            return at;
        };
        grow(grow, 0);
        e.trees.push_back(std::move(t));
    }
    for (auto& t : e.trees) {
        for (auto& n : t.nodes) {
            if (n.is_leaf()) n.scaled = scale_decimal(n.value, 0);
        }
    }
    return e;
}

} // namespace xcount
