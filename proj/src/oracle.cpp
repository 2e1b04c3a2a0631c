#include "xcount/oracle.hpp"
#include "xcount/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <string>

namespace xcount {

namespace {

std::vector<bool> sensitive_flags(const GuardTable& gt, const SensitivityQuery& q) {
    std::vector<bool> flags(gt.num_features(), false);
    for (const auto f : q.sensitive) {
        if (f >= gt.num_features()) throw ConfigError("sensitive feature " + std::to_string(f) + " out of range");
        flags[f] = true;
    }
    return flags;
}

std::uint64_t checked_region_count(const GuardTable& gt, std::uint64_t cap) {
    const std::uint64_t total = gt.num_regions();
    if (total > cap) {
        throw ConfigError("oracle region count " + std::to_string(total) + " exceeds cap " + std::to_string(cap));
    }
    return total;
}

// Region with `level[f]` trailing ones in each feature block.
RegionAssignment region_of(const GuardTable& gt, const std::vector<std::size_t>& level) {
    RegionAssignment b;
    b.bits.assign(gt.num_vars(), 0);
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) {
        const std::size_t m = gt.count(f);
        for (std::size_t i = m - level[f]; i < m; ++i) b.bits[gt.var_index(f, i)] = 1;
    }
    return b;
}

} // namespace

OracleResult oracle_count(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q, std::uint64_t cap,
                          const BudgetPtr& budget) {
    const auto flags = sensitive_flags(gt, q);
    if (q.gap < 0) throw ConfigError("gap must be non-negative");
    OracleResult out;
    out.total_regions = checked_region_count(gt, cap);

    std::vector<std::uint32_t> sens;
    std::vector<std::uint32_t> rest;
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) (flags[f] ? sens : rest).push_back(f);

    // Regions are enumerated as an odometer over per-feature levels, with the
    // non-sensitive features outermost so that every group of regions sharing
    // the same non-sensitive bits is contiguous.
    std::vector<std::uint32_t> order = rest;
    order.insert(order.end(), sens.begin(), sens.end());
    std::uint64_t group = 1;
    for (const auto f : sens) group *= gt.count(f) + 1;

    std::vector<std::size_t> level(gt.num_features(), 0);
    std::vector<std::vector<std::size_t>> sens_levels;
    out.regions.reserve(out.total_regions);
    for (std::uint64_t idx = 0; idx < out.total_regions; ++idx) {
        if (budget && (idx & 0xFFF) == 0) budget->check_time();
        RegionValue rv;
        rv.region = region_of(gt, level);
        rv.value = evaluate_region(e, gt, rv.region);
        out.regions.push_back(std::move(rv));
        std::vector<std::size_t> sl;
        for (const auto f : sens) sl.push_back(level[f]);
        if (sens_levels.size() < group) sens_levels.push_back(std::move(sl));

        for (std::size_t k = order.size(); k-- > 0;) {
            const auto f = order[k];
            if (++level[f] <= gt.count(f)) break;
            level[f] = 0;
        }
    }

    // Within a group the sensitive distance between two regions is the sum of
    // per-feature level differences.
    for (std::uint64_t base = 0; base < out.total_regions; base += group) {
        if (budget) budget->check_time();
        for (std::uint64_t i = 0; i < group; ++i) {
            auto& a = out.regions[base + i];
            for (std::uint64_t j = 0; j < group && !a.sensitive; ++j) {
                std::uint64_t dist = 0;
                for (std::size_t k = 0; k < sens.size(); ++k) {
                    const auto x = static_cast<std::int64_t>(sens_levels[i][k]);
                    const auto y = static_cast<std::int64_t>(sens_levels[j][k]);
                    dist += static_cast<std::uint64_t>(std::llabs(x - y));
                }
                if (dist == 0 || dist > q.distance) continue;
                const auto& b = out.regions[base + j];
                const __int128 diff = static_cast<__int128>(a.value) - b.value;
                if (diff > q.gap || -diff > q.gap) a.sensitive = true;
            }
        }
    }
    for (const auto& rv : out.regions) {
        if (rv.sensitive) out.sensitive_regions.push_back(rv.region);
    }
    out.count = out.sensitive_regions.size();
    return out;
}

std::uint64_t oracle_count_pairwise(const Ensemble& e, const GuardTable& gt, const SensitivityQuery& q,
                                    std::uint64_t cap) {
    const auto flags = sensitive_flags(gt, q);
    if (q.gap < 0) throw ConfigError("gap must be non-negative");
    checked_region_count(gt, cap);

    // Enumerate every bit vector and keep the monotone ones.
    const std::size_t m = gt.num_vars();
    if (m > 24) throw ConfigError("pairwise oracle limited to 24 guard variables");
    std::vector<RegionAssignment> regions;
    for (std::uint64_t code = 0; code < (1ULL << m); ++code) {
        RegionAssignment b;
        b.bits.resize(m);
        for (std::size_t v = 0; v < m; ++v) b.bits[v] = static_cast<std::uint8_t>((code >> v) & 1U);
        if (b.is_monotone(gt)) regions.push_back(std::move(b));
    }
    std::vector<std::int64_t> values;
    for (const auto& b : regions) values.push_back(evaluate_region(e, gt, b));

    std::uint64_t count = 0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = 0; j < regions.size(); ++j) {
            bool same_rest = true;
            std::uint64_t hamming = 0;
            for (std::size_t v = 0; v < m; ++v) {
                const bool differs = regions[i].bits[v] != regions[j].bits[v];
                if (!differs) continue;
                if (flags[gt.feature_of(v)]) {
                    ++hamming;
                } else {
                    same_rest = false;
                    break;
                }
            }
            if (!same_rest || hamming == 0 || hamming > q.distance) continue;
            const __int128 diff = static_cast<__int128>(values[i]) - values[j];
            if (diff > q.gap || -diff > q.gap) {
                ++count;
                break;
            }
        }
    }
    return count;
}

void write_region_csv(std::ostream& out, const OracleResult& r) {
    out << "index,bits,value,sensitive\n";
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
        const auto& rv = r.regions[i];
        out << i << ',';
        for (const auto bit : rv.region.bits) out << static_cast<char>('0' + bit);
        out << ',' << rv.value << ',' << (rv.sensitive ? 1 : 0) << '\n';
    }
}

} // namespace xcount
