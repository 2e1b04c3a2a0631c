#include "xcount/ensemble.hpp"

#include "xcount/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace xcount {

namespace {

enum class Rounding { HalfAwayFromZero, Floor };

using u128 = unsigned __int128;

u128 pow10_u128(int k) {
    u128 r = 1;
    for (int i = 0; i < k; ++i) r *= 10;
    return r;
}

std::int64_t scale_exact(double value, int precision, Rounding mode) {
    if (!std::isfinite(value)) throw ConfigError("cannot scale a non-finite value");
    if (precision < 0 || precision > 9) throw ConfigError("precision must be in [0, 9]");
    if (value == 0.0) return 0;

    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific);
    std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));

    const bool negative = text.front() == '-';
    if (negative) text.remove_prefix(1);

    // d[.ddd]e[+-]xx
    const auto e_pos = text.find('e');
    std::string_view mantissa = text.substr(0, e_pos);
    int exponent = 0;
    std::from_chars(text.data() + e_pos + 1 + (text[e_pos + 1] == '+' ? 1 : 0),
                    text.data() + text.size(), exponent);

    std::uint64_t digits = 0;
    int frac_digits = 0;
    bool after_point = false;
    for (char c : mantissa) {
        if (c == '.') {
            after_point = true;
            continue;
        }
        digits = digits * 10 + static_cast<std::uint64_t>(c - '0');
        if (after_point) ++frac_digits;
    }
    // |value| = digits * 10^(exponent - frac_digits)
    const int shift = exponent - frac_digits + precision;

    constexpr u128 kLimit = static_cast<u128>(std::numeric_limits<std::int64_t>::max());
    u128 magnitude = 0;
    bool inexact_up = false; // true when truncation discarded a non-zero remainder
    if (shift >= 0) {
        if (shift > 19) throw OverflowError("scaled value overflows int64");
        magnitude = static_cast<u128>(digits) * pow10_u128(shift);
    } else {
        const int k = -shift;
        if (k > 30) {
            magnitude = 0;
            inexact_up = digits != 0;
            if (mode == Rounding::HalfAwayFromZero) inexact_up = false;
        } else {
            const u128 div = pow10_u128(k);
            magnitude = digits / div;
            const u128 rem = digits % div;
            if (mode == Rounding::HalfAwayFromZero) {
                if (rem * 2 >= div) magnitude += 1;
            } else {
                inexact_up = rem != 0;
            }
        }
    }
    if (mode == Rounding::Floor && negative && inexact_up) magnitude += 1;
    if (magnitude > kLimit) throw OverflowError("scaled value overflows int64");
    const auto m = static_cast<std::int64_t>(magnitude);
    return negative ? -m : m;
}

std::size_t depth_from(const Tree& t, std::int32_t idx) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(t, n.yes), depth_from(t, n.no));
}

bool same_from(const Tree& a, std::int32_t ia, const Tree& b, std::int32_t ib) {
    const TreeNode& x = a.nodes[static_cast<std::size_t>(ia)];
    const TreeNode& y = b.nodes[static_cast<std::size_t>(ib)];
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf()) return x.scaled == y.scaled && x.value == y.value;
    return x.guard == y.guard && same_from(a, x.yes, b, y.yes) && same_from(a, x.no, b, y.no);
}

} // namespace

std::int64_t scale_decimal(double value, int precision) {
    return scale_exact(value, precision, Rounding::HalfAwayFromZero);
}

std::int64_t scale_decimal_floor(double value, int precision) {
    return scale_exact(value, precision, Rounding::Floor);
}

std::size_t Tree::depth() const { return nodes.empty() ? 0 : depth_from(*this, 0); }

std::size_t Tree::num_leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
    const TreeNode* n = &nodes.front();
    while (!n->is_leaf()) {
        const bool yes = x[n->guard.feature] < n->guard.threshold;
        n = &nodes[static_cast<std::size_t>(yes ? n->yes : n->no)];
    }
    return *n;
}

bool Tree::same_structure(const Tree& other) const {
    return same_from(*this, 0, other, 0);
}

Tree Tree::leaf(double value) {
    Tree t;
    TreeNode n;
    n.value = value;
    n.scaled = scale_decimal(value, 0);
    t.nodes.push_back(n);
    return t;
}

std::size_t Ensemble::num_leaves() const {
    std::size_t total = 0;
    for (const auto& t : trees) total += t.num_leaves();
    return total;
}

std::size_t Ensemble::max_depth() const {
    std::size_t d = 0;
    for (const auto& t : trees) d = std::max(d, t.depth());
    return d;
}

double Ensemble::predict(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.leaf_for(x).value;
    return sum;
}

std::int64_t Ensemble::predict_scaled(std::span<const double> x) const {
    std::int64_t sum = 0;
    for (const auto& t : trees) {
        if (__builtin_add_overflow(sum, t.leaf_for(x).scaled, &sum)) {
            throw OverflowError("ensemble output overflows int64");
        }
    }
    return sum;
}

Ensemble quantize_leaves(const Ensemble& e, int precision) {
    if (precision < 0 || precision > 9) throw ConfigError("precision must be in [0, 9]");
    Ensemble out = e;
    std::int64_t scale = 1;
    for (int i = 0; i < precision; ++i) scale *= 10;
    out.leaf_scale = scale;
    out.precision = precision;
    for (auto& t : out.trees) {
        for (auto& n : t.nodes) {
            if (n.is_leaf()) n.scaled = scale_decimal(n.value, precision);
        }
    }
    return out;
}

GuardTable GuardTable::build(const Ensemble& e) {
    GuardTable gt;
    gt.thresholds_.resize(e.num_features);
    for (const auto& t : e.trees) {
        for (const auto& n : t.nodes) {
            if (!n.is_leaf()) gt.thresholds_.at(n.guard.feature).push_back(n.guard.threshold);
        }
    }
    gt.block_start_.reserve(e.num_features);
    for (std::uint32_t f = 0; f < e.num_features; ++f) {
        auto& th = gt.thresholds_[f];
        std::sort(th.begin(), th.end());
        th.erase(std::unique(th.begin(), th.end()), th.end());
        gt.block_start_.push_back(gt.feature_of_.size());
        gt.feature_of_.insert(gt.feature_of_.end(), th.size(), f);
    }
    return gt;
}

std::size_t GuardTable::var_index(std::uint32_t feature, std::size_t position) const {
    if (position >= count(feature)) throw std::out_of_range("guard position out of range");
    return block_start_[feature] + position;
}

std::optional<std::size_t> GuardTable::find(const Guard& g) const {
    if (g.feature >= thresholds_.size()) return std::nullopt;
    const auto& th = thresholds_[g.feature];
    auto it = std::lower_bound(th.begin(), th.end(), g.threshold);
    if (it == th.end() || *it != g.threshold) return std::nullopt;
    return block_start_[g.feature] + static_cast<std::size_t>(it - th.begin());
}

std::uint64_t GuardTable::num_regions() const {
    std::uint64_t total = 1;
    for (const auto& th : thresholds_) {
        if (__builtin_mul_overflow(total, th.size() + 1, &total)) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return total;
}

bool RegionAssignment::is_monotone(const GuardTable& gt) const {
    if (bits.size() != gt.num_vars()) return false;
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) {
        const std::size_t start = gt.block_start(f);
        for (std::size_t i = 1; i < gt.count(f); ++i) {
            if (bits[start + i - 1] && !bits[start + i]) return false;
        }
    }
    return true;
}

RegionAssignment encode_input(const GuardTable& gt, std::span<const double> x) {
    RegionAssignment b;
    b.bits.assign(gt.num_vars(), 0);
    for (std::uint32_t f = 0; f < gt.num_features(); ++f) {
        const auto th = gt.thresholds(f);
        for (std::size_t i = 0; i < th.size(); ++i) {
            b.bits[gt.block_start(f) + i] = x[f] < th[i] ? 1 : 0;
        }
    }
    return b;
}

std::int64_t evaluate_region(const Ensemble& e, const GuardTable& gt, const RegionAssignment& b) {
    std::int64_t sum = 0;
    for (const auto& t : e.trees) {
        const TreeNode* n = &t.nodes.front();
        while (!n->is_leaf()) {
            const auto var = gt.find(n->guard);
            if (!var) throw std::invalid_argument("guard absent from guard table");
            n = &t.nodes[static_cast<std::size_t>(b.bits[*var] ? n->yes : n->no)];
        }
        if (__builtin_add_overflow(sum, n->scaled, &sum)) {
            throw OverflowError("ensemble output overflows int64");
        }
    }
    return sum;
}

} // namespace xcount
