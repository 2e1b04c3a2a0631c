#pragma once

#include "xcount/dd.hpp"
#include "xcount/ensemble.hpp"

#include <span>

namespace xcount {

/// Maps guard variable v (GuardTable numbering) to a manager variable. An
/// empty layout is the identity.
using VarLayout = std::span<const dd::VarId>;

/// ADD of the tree's scaled leaf value over the guard variables: guard
/// (f, theta_i) becomes `var ? yes : no`. Throws std::invalid_argument if a
/// guard threshold is missing from the table.
dd::Add tree_to_add(dd::Manager& m, const Tree& t, const GuardTable& gt, VarLayout layout = {});

/// Sum of tree_to_add over every tree of the ensemble.
dd::Add ensemble_to_add(dd::Manager& m, const Ensemble& e, const GuardTable& gt, VarLayout layout = {});

/// Suffix-ones constraint on one feature block: b_i implies b_{i+1}.
dd::Bdd monotone_constraint(dd::Manager& m, const GuardTable& gt, std::uint32_t feature, VarLayout layout = {});

/// Conjunction of monotone_constraint over `features`.
dd::Bdd monotone_constraint(dd::Manager& m, const GuardTable& gt, std::span<const std::uint32_t> features,
                            VarLayout layout = {});

} // namespace xcount
