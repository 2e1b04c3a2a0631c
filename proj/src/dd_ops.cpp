#include "xcount/dd.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace xcount::dd {

namespace {

Manager& same_manager(const Add& a, const Add& b) {
    if (&a.manager() != &b.manager()) throw std::invalid_argument("operands belong to different managers");
    return a.manager();
}

Manager& same_manager(const Bdd& a, const Bdd& b) {
    if (&a.manager() != &b.manager()) throw std::invalid_argument("operands belong to different managers");
    return a.manager();
}

struct PairHash {
    std::size_t operator()(const std::pair<NodeId, NodeId>& p) const {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(p.first) << 32) | p.second);
    }
};

} // namespace

bool Add::is_constant() const { return mgr_->is_terminal(node_); }

std::int64_t Add::constant_value() const {
    if (!is_constant()) throw std::logic_error("Add is not constant");
    return mgr_->value(node_);
}

bool Bdd::is_true() const { return mgr_->is_terminal(node_) && mgr_->value(node_) == 1; }
bool Bdd::is_false() const { return mgr_->is_terminal(node_) && mgr_->value(node_) == 0; }

Add add_apply(AddOp op, Add a, Add b) {
    Manager& m = same_manager(a, b);
    Op raw = Op::Plus;
    switch (op) {
    case AddOp::Plus: raw = Op::Plus; break;
    case AddOp::Minus: raw = Op::Minus; break;
    case AddOp::Times: raw = Op::Times; break;
    case AddOp::Min: raw = Op::Min; break;
    case AddOp::Max: raw = Op::Max; break;
    }
    return Add(m, m.apply(raw, a.node(), b.node()));
}

Bdd operator&(Bdd a, Bdd b) {
    Manager& m = same_manager(a, b);
    return Bdd(m, m.apply(Op::And, a.node(), b.node()));
}

Bdd operator|(Bdd a, Bdd b) {
    Manager& m = same_manager(a, b);
    return Bdd(m, m.apply(Op::Or, a.node(), b.node()));
}

Bdd operator^(Bdd a, Bdd b) {
    Manager& m = same_manager(a, b);
    return Bdd(m, m.apply(Op::Xor, a.node(), b.node()));
}

Bdd operator!(Bdd a) { return a ^ a.manager().bdd_true(); }

Bdd bdd_ite(Bdd cond, Bdd then_bdd, Bdd else_bdd) {
    return (cond & then_bdd) | ((!cond) & else_bdd);
}

Bdd cube(Manager& m, std::span<const VarId> vars, std::span<const std::uint8_t> values) {
    if (vars.size() != values.size()) throw std::invalid_argument("cube: length mismatch");
    std::vector<std::pair<VarId, std::uint8_t>> lits;
    for (std::size_t i = 0; i < vars.size(); ++i) lits.emplace_back(vars[i], values[i]);
    std::sort(lits.begin(), lits.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    NodeId acc = m.terminal(1);
    const NodeId zero = m.terminal(0);
    for (const auto& [v, bit] : lits) {
        if (v.index >= m.num_vars()) throw std::out_of_range("cube: variable outside universe");
        if (m.var(acc) == v.index) {
            // Repeated variable: conflicting literals give false.
            const bool existing = m.low(acc) == zero;
            if (existing != (bit != 0)) acc = zero;
            continue;
        }
        acc = bit ? m.node(v.index, zero, acc) : m.node(v.index, acc, zero);
    }
    return Bdd(m, acc);
}

Add to_add(Bdd b) { return Add(b.manager(), b.node()); }

Bdd threshold_to_bdd(Add a, std::int64_t g, ThresholdMode mode) {
    Manager& m = a.manager();
    std::unordered_map<NodeId, NodeId> memo;
    auto rec = [&](auto&& self, NodeId f) -> NodeId {
        if (m.is_terminal(f)) {
            const std::int64_t v = m.value(f);
            bool on = false;
            if (mode == ThresholdMode::Greater) {
                on = v > g;
            } else {
                // |v| > g without negating INT64_MIN.
                on = v > g || (v < 0 && (g < 0 || v < -g));
            }
            return m.terminal(on ? 1 : 0);
        }
        if (auto it = memo.find(f); it != memo.end()) return it->second;
        m.tick();
        const std::uint32_t v = m.var(f);
        const NodeId lo = self(self, m.low(f));
        const NodeId hi = self(self, m.high(f));
        const NodeId r = m.node(v, lo, hi);
        memo.emplace(f, r);
        return r;
    };
    return Bdd(m, rec(rec, a.node()));
}

Bdd at_most_distance(Manager& m, std::span<const VarId> vars_a, std::span<const VarId> vars_b, std::uint32_t d) {
    if (vars_a.size() != vars_b.size()) throw std::invalid_argument("at_most_distance: length mismatch");
    const std::size_t n = vars_a.size();
    if (d >= n) return m.bdd_true();
    // row[k] = "differences among pairs i.. n-1 are at most k"
    std::vector<Bdd> row(d + 1, m.bdd_true());
    for (std::size_t i = n; i-- > 0;) {
        const Bdd diff = m.bdd_var(vars_a[i]) ^ m.bdd_var(vars_b[i]);
        std::vector<Bdd> next(d + 1);
        for (std::uint32_t k = 0; k <= d; ++k) {
            const Bdd if_diff = k == 0 ? m.bdd_false() : row[k - 1];
            next[k] = bdd_ite(diff, if_diff, row[k]);
        }
        row = std::move(next);
    }
    return row[d];
}

Add substitute_vars(Add a, const VarMap& mapping) {
    Manager& m = a.manager();
    std::vector<std::uint32_t> target(m.num_vars());
    for (std::uint32_t v = 0; v < m.num_vars(); ++v) target[v] = v;
    std::unordered_set<std::uint32_t> sources;
    for (const auto& [from, to] : mapping) {
        if (from.index >= m.num_vars() || to.index >= m.num_vars()) {
            throw std::out_of_range("substitute_vars: variable outside universe");
        }
        if (!sources.insert(from.index).second) throw std::invalid_argument("substitute_vars: duplicate source");
        target[from.index] = to.index;
    }
    std::unordered_set<std::uint32_t> images;
    for (const VarId v : support(a)) {
        if (!images.insert(target[v.index]).second) {
            throw std::invalid_argument("substitute_vars: image variable occurs in the diagram");
        }
    }
    std::unordered_map<NodeId, NodeId> memo;
    auto rec = [&](auto&& self, NodeId f) -> NodeId {
        if (m.is_terminal(f)) return f;
        if (auto it = memo.find(f); it != memo.end()) return it->second;
        const std::uint32_t v = m.var(f);
        const NodeId lo = self(self, m.low(f));
        const NodeId hi = self(self, m.high(f));
        const NodeId r = m.ite_var(target[v], hi, lo);
        memo.emplace(f, r);
        return r;
    };
    return Add(m, rec(rec, a.node()));
}

Bdd exists_project(Bdd b, std::span<const VarId> vars) {
    Manager& m = b.manager();
    std::vector<bool> quantified(m.num_vars(), false);
    for (const VarId v : vars) {
        if (v.index >= m.num_vars()) throw std::out_of_range("exists_project: variable outside universe");
        quantified[v.index] = true;
    }
    std::unordered_map<NodeId, NodeId> memo;
    auto rec = [&](auto&& self, NodeId f) -> NodeId {
        if (m.is_terminal(f)) return f;
        if (auto it = memo.find(f); it != memo.end()) return it->second;
        m.tick();
        const std::uint32_t v = m.var(f);
        const NodeId lo = self(self, m.low(f));
        const NodeId hi = self(self, m.high(f));
        const NodeId r = quantified[v] ? m.apply(Op::Or, lo, hi) : m.node(v, lo, hi);
        memo.emplace(f, r);
        return r;
    };
    return Bdd(m, rec(rec, b.node()));
}

Add restrict_to(Add f, Bdd care) {
    Manager& m = f.manager();
    if (&care.manager() != &m) throw std::invalid_argument("operands belong to different managers");
    const NodeId zero = m.terminal(0);
    std::unordered_map<std::pair<NodeId, NodeId>, NodeId, PairHash> memo;
    auto rec = [&](auto&& self, NodeId g, NodeId c) -> NodeId {
        if (m.is_terminal(c) || m.is_terminal(g)) return g;
        const auto key = std::make_pair(g, c);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        m.tick();
        const std::uint32_t vg = m.var(g);
        const std::uint32_t vc = m.var(c);
        NodeId r = 0;
        if (vc < vg) {
            r = self(self, g, m.apply(Op::Or, m.low(c), m.high(c)));
        } else {
            const NodeId c0 = vc == vg ? m.low(c) : c;
            const NodeId c1 = vc == vg ? m.high(c) : c;
            if (c0 == zero) {
                r = self(self, m.high(g), c1);
            } else if (c1 == zero) {
                r = self(self, m.low(g), c0);
            } else {
                const NodeId lo = self(self, m.low(g), c0);
                const NodeId hi = self(self, m.high(g), c1);
                r = m.ite_var(vg, hi, lo);
            }
        }
        memo.emplace(key, r);
        return r;
    };
    return Add(m, rec(rec, f.node(), care.node()));
}

std::int64_t evaluate(Add a, std::span<const std::uint8_t> assignment) {
    const Manager& m = a.manager();
    NodeId n = a.node();
    while (!m.is_terminal(n)) n = assignment[m.var(n)] ? m.high(n) : m.low(n);
    return m.value(n);
}

bool evaluate(Bdd b, std::span<const std::uint8_t> assignment) {
    return evaluate(Add(b.manager(), b.node()), assignment) != 0;
}

namespace {

template <typename Visit>
void for_each_node(const Manager& m, NodeId root, Visit&& visit) {
    std::unordered_set<NodeId> seen;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        visit(n);
        if (!m.is_terminal(n)) {
            stack.push_back(m.high(n));
            stack.push_back(m.low(n));
        }
    }
}

} // namespace

std::vector<VarId> support(Add a) {
    const Manager& m = a.manager();
    std::vector<std::uint32_t> vars;
    for_each_node(m, a.node(), [&](NodeId n) {
        if (!m.is_terminal(n)) vars.push_back(m.var(n));
    });
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    std::vector<VarId> out;
    out.reserve(vars.size());
    for (auto v : vars) out.push_back(VarId{v});
    return out;
}

std::size_t dag_size(Add a) {
    std::size_t count = 0;
    for_each_node(a.manager(), a.node(), [&](NodeId) { ++count; });
    return count;
}

std::vector<std::int64_t> terminal_values(Add a) {
    const Manager& m = a.manager();
    std::vector<std::int64_t> values;
    for_each_node(m, a.node(), [&](NodeId n) {
        if (m.is_terminal(n)) values.push_back(m.value(n));
    });
    std::sort(values.begin(), values.end());
    return values;
}

namespace {

NodeId copy_into(const Manager& src, NodeId root, Manager& dst) {
    std::unordered_map<NodeId, NodeId> memo;
    auto rec = [&](auto&& self, NodeId f) -> NodeId {
        if (src.is_terminal(f)) return dst.terminal(src.value(f));
        if (auto it = memo.find(f); it != memo.end()) return it->second;
        const std::uint32_t v = src.var(f);
        if (v >= dst.num_vars()) throw std::out_of_range("transfer: destination universe too small");
        const NodeId lo = self(self, src.low(f));
        const NodeId hi = self(self, src.high(f));
        const NodeId r = dst.node(v, lo, hi);
        memo.emplace(f, r);
        return r;
    };
    return rec(rec, root);
}

std::string dot_of(const Manager& m, NodeId root, const VarLabeler& label) {
    std::ostringstream out;
    out << "digraph dd {\n";
    for_each_node(m, root, [&](NodeId n) {
        if (m.is_terminal(n)) {
            out << "  n" << n << " [shape=box,label=\"" << m.value(n) << "\"];\n";
            return;
        }
        const VarId v{m.var(n)};
        const std::string text = label ? label(v) : "x" + std::to_string(v.index);
        out << "  n" << n << " [label=\"" << text << "\\n#" << n << "\"];\n";
        out << "  n" << n << " -> n" << m.high(n) << ";\n";
        out << "  n" << n << " -> n" << m.low(n) << " [style=dashed];\n";
    });
    out << "}\n";
    return out.str();
}

} // namespace

Add transfer(Add a, Manager& dst) { return Add(dst, copy_into(a.manager(), a.node(), dst)); }
Bdd transfer(Bdd b, Manager& dst) { return Bdd(dst, copy_into(b.manager(), b.node(), dst)); }

std::string to_dot(Add a, const VarLabeler& label) { return dot_of(a.manager(), a.node(), label); }
std::string to_dot(Bdd b, const VarLabeler& label) { return dot_of(b.manager(), b.node(), label); }

} // namespace xcount::dd
