#include "xcount/subproblems.hpp"
#include "xcount/encode.hpp"
#include "xcount/errors.hpp"

#include <algorithm>

namespace xcount {

std::vector<MaskBlock> bitmask_gen(std::size_t m) {
    std::vector<MaskBlock> out;
    out.reserve(m + 1);
    for (std::size_t ones = 0; ones <= m; ++ones) {
        MaskBlock block(m, 0);
        std::fill(block.end() - static_cast<std::ptrdiff_t>(ones), block.end(), 1);
        out.push_back(std::move(block));
    }
    return out;
}

SensitiveLayout SensitiveLayout::build(const GuardTable& gt, std::span<const std::uint32_t> sensitive) {
    if (sensitive.empty()) throw ConfigError("sensitive feature list is empty");
    SensitiveLayout out;
    out.features.assign(sensitive.begin(), sensitive.end());
    std::sort(out.features.begin(), out.features.end());
    out.features.erase(std::unique(out.features.begin(), out.features.end()), out.features.end());
    for (const auto f : out.features) {
        if (f >= gt.num_features()) throw ConfigError("sensitive feature " + std::to_string(f) + " out of range");
    }
    out.slot.assign(gt.num_vars(), -1);
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) {
        const bool sens = std::binary_search(out.features.begin(), out.features.end(), f);
        if (!sens) out.rest_features.push_back(f);
        for (std::size_t i = 0; i < gt.count(f); ++i) {
            const std::size_t v = gt.var_index(f, i);
            if (sens) {
                out.slot[v] = static_cast<std::int64_t>(out.sensitive_vars.size());
                out.sensitive_vars.push_back(v);
            } else {
                out.rest_vars.push_back(v);
            }
        }
    }
    return out;
}

std::vector<dd::VarId> SensitiveLayout::rest_ids() const {
    std::vector<dd::VarId> ids;
    ids.reserve(rest_vars.size());
    for (const auto v : rest_vars) ids.push_back(dd::VarId{static_cast<std::uint32_t>(v)});
    return ids;
}

std::vector<SensitiveMask> global_mask_set(const GuardTable& gt, const SensitiveLayout& layout) {
    std::vector<SensitiveMask> masks{SensitiveMask{}};
    for (const auto f : layout.features) {
        const auto blocks = bitmask_gen(gt.count(f));
        std::vector<SensitiveMask> next;
        next.reserve(masks.size() * blocks.size());
        for (const auto& prefix : masks) {
            for (const auto& block : blocks) {
                SensitiveMask mask = prefix;
                mask.bits.insert(mask.bits.end(), block.begin(), block.end());
                next.push_back(std::move(mask));
            }
        }
        masks = std::move(next);
    }
    return masks;
}

std::size_t hamming_distance(const SensitiveMask& a, const SensitiveMask& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) d += a.bits[i] != b.bits[i];
    return d;
}

std::vector<Subproblem> enumerate_subproblems(const std::vector<SensitiveMask>& masks, std::size_t d) {
    std::vector<Subproblem> out;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        for (std::size_t j = 0; j < masks.size(); ++j) {
            const std::size_t dist = hamming_distance(masks[i], masks[j]);
            if (dist >= 1 && dist <= d) out.push_back(Subproblem{i, j});
        }
    }
    return out;
}

Tree prune_tree(const Tree& t, const GuardTable& gt, const SensitiveLayout& layout, const SensitiveMask& mask) {
    Tree out;
    auto rec = [&](auto&& self, std::int32_t idx) -> std::int32_t {
        const TreeNode* n = &t.nodes.at(static_cast<std::size_t>(idx));
        while (!n->is_leaf()) {
            const auto var = gt.find(n->guard);
            if (!var) throw std::invalid_argument("guard absent from guard table");
            if (!layout.is_sensitive_var(*var)) break;
            const bool yes = mask.bits.at(static_cast<std::size_t>(layout.slot[*var])) != 0;
            n = &t.nodes[static_cast<std::size_t>(yes ? n->yes : n->no)];
        }
        const auto at = static_cast<std::int32_t>(out.nodes.size());
        out.nodes.push_back(*n);
        if (!n->is_leaf()) {
            const std::int32_t yes = self(self, n->yes);
            const std::int32_t no = self(self, n->no);
            out.nodes[static_cast<std::size_t>(at)].yes = yes;
            out.nodes[static_cast<std::size_t>(at)].no = no;
        }
        return at;
    };
    rec(rec, 0);
    return out;
}

namespace {

bool has_sensitive_guard(const Tree& t, const GuardTable& gt, const SensitiveLayout& layout) {
    for (const auto& n : t.nodes) {
        if (n.is_leaf()) continue;
        const auto var = gt.find(n.guard);
        if (var && layout.is_sensitive_var(*var)) return true;
    }
    return false;
}

} // namespace

dd::Bdd process_subproblem(dd::Manager& m, const Ensemble& e, const GuardTable& gt, const SensitiveLayout& layout,
                           const SensitiveMask& mask1, const SensitiveMask& mask2, std::int64_t gap) {
    // Only monotone assignments are ever counted, so the running sum may
    // take any value elsewhere; restricting it keeps the diagram small.
    const dd::Bdd valid = monotone_constraint(m, gt, layout.rest_features);
    dd::Add diff = m.constant(0);
    for (const auto& t : e.trees) {
        if (!has_sensitive_guard(t, gt, layout)) continue;
        const dd::Add a = tree_to_add(m, prune_tree(t, gt, layout, mask1), gt);
        const dd::Add b = tree_to_add(m, prune_tree(t, gt, layout, mask2), gt);
        diff = dd::restrict_to(diff + (a - b), valid);
    }
    const dd::Bdd above = dd::threshold_to_bdd(diff, gap, dd::ThresholdMode::Greater);
    if (above.is_false()) return above;
    return above & valid;
}

UniverseSize solution_universe_size(dd::Bdd phi, const SensitiveLayout& layout) {
    UniverseSize out;
    out.t = dd::count_models(phi, layout.rest_ids());
    out.regions = out.t * 2;
    return out;
}

} // namespace xcount
