#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xcount {

/// Split predicate `x[feature] < threshold`. The yes-branch is taken when the
/// predicate holds.
struct Guard {
    std::uint32_t feature = 0;
    double threshold = 0.0;

    friend bool operator==(const Guard&, const Guard&) = default;
};

/// One node of a flat tree. Internal nodes have both children set; leaves have
/// neither. `scaled` is the leaf value multiplied by the ensemble's leaf_scale
/// and rounded, i.e. the exact integer used by every counting routine.
struct TreeNode {
    static constexpr std::int32_t kNone = -1;

    Guard guard;
    std::int32_t yes = kNone;
    std::int32_t no = kNone;
    double value = 0.0;
    std::int64_t scaled = 0;

    bool is_leaf() const { return yes == kNone; }
};

/// Binary decision tree stored as a node array; index 0 is the root.
struct Tree {
    std::vector<TreeNode> nodes;

    const TreeNode& root() const { return nodes.front(); }
    std::size_t depth() const;
    std::size_t num_leaves() const;
    std::size_t num_internal() const { return nodes.size() - num_leaves(); }

    /// Leaf reached by the numeric input `x`.
    const TreeNode& leaf_for(std::span<const double> x) const;

    /// Structural equality including leaf values (used to spot unchanged
    /// trees after pruning).
    bool same_structure(const Tree& other) const;

    static Tree leaf(double value);
};

/// Additive ensemble: the prediction is the sum of the per-tree leaf values.
struct Ensemble {
    std::vector<Tree> trees;
    std::uint32_t num_features = 0;
    /// 10^precision; 1 for an ensemble that has not been quantized.
    std::int64_t leaf_scale = 1;
    int precision = 0;

    std::size_t num_leaves() const;
    std::size_t max_depth() const;

    /// Raw prediction in model units.
    double predict(std::span<const double> x) const;
    /// Prediction as the sum of scaled leaves.
    std::int64_t predict_scaled(std::span<const double> x) const;
};

/// Exact decimal scaling of `value` by 10^precision, rounding half away from
/// zero. The shortest round-trip decimal form of `value` is scaled, so 0.0015
/// at precision 3 yields 2 rather than the 1 that binary multiplication gives.
std::int64_t scale_decimal(double value, int precision);

/// Same scaling but rounding toward negative infinity. For integer-valued
/// differences D, `D > floor(g * 10^p)` iff `D > g * 10^p`.
std::int64_t scale_decimal_floor(double value, int precision);

/// Parses the canonical ensemble JSON. Throws ParseError.
Ensemble parse_ensemble(std::string_view document);
Ensemble parse_ensemble(std::istream& in);
Ensemble load_ensemble(const std::string& path);

/// Canonical JSON serialization (inverse of parse_ensemble).
std::string to_json(const Ensemble& e, int indent = -1);

/// Replaces every leaf's scaled value with round(value * 10^precision).
/// Throws ConfigError for precision outside [0, 9], OverflowError when a
/// scaled leaf does not fit.
Ensemble quantize_leaves(const Ensemble& e, int precision);

/// Sorted distinct thresholds per feature and the global Boolean variable
/// layout: feature-major blocks, thresholds ascending within a block.
class GuardTable {
public:
    static GuardTable build(const Ensemble& e);

    std::size_t num_features() const { return thresholds_.size(); }
    /// Total number of guard variables (M).
    std::size_t num_vars() const { return feature_of_.size(); }
    /// m_f
    std::size_t count(std::uint32_t feature) const { return thresholds_.at(feature).size(); }
    std::span<const double> thresholds(std::uint32_t feature) const { return thresholds_.at(feature); }
    std::size_t block_start(std::uint32_t feature) const { return block_start_.at(feature); }

    /// Global variable index of the i-th (0-based) threshold of `feature`.
    std::size_t var_index(std::uint32_t feature, std::size_t position) const;
    std::uint32_t feature_of(std::size_t var) const { return feature_of_.at(var); }
    std::size_t position_of(std::size_t var) const { return var - block_start_.at(feature_of_.at(var)); }

    /// Variable index for a guard, or nullopt if the threshold is not in the table.
    std::optional<std::size_t> find(const Guard& g) const;

    /// Product of (m_f + 1) over all features, saturating at UINT64_MAX.
    std::uint64_t num_regions() const;

    friend bool operator==(const GuardTable&, const GuardTable&) = default;

private:
    std::vector<std::vector<double>> thresholds_;
    std::vector<std::size_t> block_start_;
    std::vector<std::uint32_t> feature_of_;
};

inline GuardTable build_guard_table(const Ensemble& e) { return GuardTable::build(e); }

/// Boolean guard vector b: bits[v] == 1 iff x_f < theta_i for v = (f, i).
struct RegionAssignment {
    std::vector<std::uint8_t> bits;

    /// Every block is of suffix-ones form.
    bool is_monotone(const GuardTable& gt) const;

    friend bool operator==(const RegionAssignment&, const RegionAssignment&) = default;
    friend auto operator<=>(const RegionAssignment&, const RegionAssignment&) = default;
};

RegionAssignment encode_input(const GuardTable& gt, std::span<const double> x);

/// V(b): sum of scaled leaves reached when every guard (f, theta_i) follows
/// its yes-branch iff bit (f, i) is set.
std::int64_t evaluate_region(const Ensemble& e, const GuardTable& gt, const RegionAssignment& b);

} // namespace xcount
