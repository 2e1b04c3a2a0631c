#include "xcount/encode.hpp"

#include <stdexcept>

namespace xcount {

namespace {

dd::VarId map_var(const GuardTable& gt, VarLayout layout, std::size_t v) {
    if (layout.empty()) return dd::VarId{static_cast<std::uint32_t>(v)};
    if (layout.size() != gt.num_vars()) throw std::invalid_argument("layout size does not match guard table");
    return layout[v];
}

} // namespace

dd::Add tree_to_add(dd::Manager& m, const Tree& t, const GuardTable& gt, VarLayout layout) {
    auto rec = [&](auto&& self, std::int32_t idx) -> dd::NodeId {
        const TreeNode& n = t.nodes.at(static_cast<std::size_t>(idx));
        if (n.is_leaf()) return m.terminal(n.scaled);
        const auto var = gt.find(n.guard);
        if (!var) throw std::invalid_argument("guard threshold missing from guard table");
        const dd::NodeId yes = self(self, n.yes);
        const dd::NodeId no = self(self, n.no);
        return m.ite_var(map_var(gt, layout, *var).index, yes, no);
    };
    if (t.nodes.empty()) throw std::invalid_argument("empty tree");
    return dd::Add(m, rec(rec, 0));
}

dd::Add ensemble_to_add(dd::Manager& m, const Ensemble& e, const GuardTable& gt, VarLayout layout) {
    dd::Add sum = m.constant(0);
    for (const Tree& t : e.trees) sum = sum + tree_to_add(m, t, gt, layout);
    return sum;
}

dd::Bdd monotone_constraint(dd::Manager& m, const GuardTable& gt, std::uint32_t feature, VarLayout layout) {
    const std::size_t k = gt.count(feature);
    dd::Bdd acc = m.bdd_true();
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const dd::Bdd lo = m.bdd_var(map_var(gt, layout, gt.var_index(feature, i)));
        const dd::Bdd hi = m.bdd_var(map_var(gt, layout, gt.var_index(feature, i + 1)));
        acc = acc & ((!lo) | hi);
    }
    return acc;
}

dd::Bdd monotone_constraint(dd::Manager& m, const GuardTable& gt, std::span<const std::uint32_t> features,
                            VarLayout layout) {
    dd::Bdd acc = m.bdd_true();
    for (const std::uint32_t f : features) acc = acc & monotone_constraint(m, gt, f, layout);
    return acc;
}

} // namespace xcount
