#pragma once

#include "xcount/bigint.hpp"
#include "xcount/random.hpp"
#include "xcount/resources.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

/// Reduced ordered decision diagrams with integer terminals.
///
/// A single node store holds both ADDs (integer-valued) and BDDs; a BDD is a
/// diagram whose only terminals are 0 and 1. Nodes are hash-consed, so two
/// handles from the same manager are equal iff they denote the same function.
/// Variable order is the numeric order of VarId. Managers are single-threaded
/// and handles never cross managers (use `transfer` to copy).
namespace xcount::dd {

struct VarId {
    std::uint32_t index = 0;
    friend auto operator<=>(const VarId&, const VarId&) = default;
};

using NodeId = std::uint32_t;
using Assignment = std::vector<std::uint8_t>;

class Manager;

class Add {
public:
    Add() = default;
    Add(Manager& m, NodeId n) : mgr_(&m), node_(n) {}

    Manager& manager() const { return *mgr_; }
    NodeId node() const { return node_; }
    bool is_constant() const;
    std::int64_t constant_value() const;

    friend bool operator==(const Add&, const Add&) = default;

private:
    Manager* mgr_ = nullptr;
    NodeId node_ = 0;
};

class Bdd {
public:
    Bdd() = default;
    Bdd(Manager& m, NodeId n) : mgr_(&m), node_(n) {}

    Manager& manager() const { return *mgr_; }
    NodeId node() const { return node_; }
    bool is_true() const;
    bool is_false() const;
    bool is_constant() const { return is_true() || is_false(); }

    friend bool operator==(const Bdd&, const Bdd&) = default;

private:
    Manager* mgr_ = nullptr;
    NodeId node_ = 0;
};

enum class Op : std::uint8_t {
    Plus,
    Minus,
    Times,
    Min,
    Max,
    // 0/1 operands only
    And,
    Or,
    Xor,
    IteVar, // internal
};

class Manager {
public:
    static constexpr std::uint32_t kTerminalVar = 0xFFFFFFFFu;

    explicit Manager(std::uint32_t num_vars, BudgetPtr budget = nullptr);
    ~Manager();
    Manager(const Manager&) = delete;
    Manager& operator=(const Manager&) = delete;

    std::uint32_t num_vars() const { return num_vars_; }

    Add constant(std::int64_t value) { return Add(*this, terminal(value)); }
    /// 0/1-valued Add of a single variable.
    Add indicator(VarId v) { return Add(*this, node(check_var(v), terminal(0), terminal(1))); }
    Bdd bdd_true() { return Bdd(*this, terminal(1)); }
    Bdd bdd_false() { return Bdd(*this, terminal(0)); }
    Bdd bdd_var(VarId v) { return Bdd(*this, node(check_var(v), terminal(0), terminal(1))); }

    // Raw node access for the algorithms layered on top of the store.
    bool is_terminal(NodeId n) const { return nodes_[n].var == kTerminalVar; }
    std::int64_t value(NodeId n) const { return nodes_[n].value; }
    std::uint32_t var(NodeId n) const { return nodes_[n].var; }
    NodeId low(NodeId n) const { return nodes_[n].low; }
    NodeId high(NodeId n) const { return nodes_[n].high; }

    NodeId terminal(std::int64_t value);
    /// Reduced, hash-consed node. Requires var < var(low), var(high).
    NodeId node(std::uint32_t var, NodeId low, NodeId high);

    /// Memoized pointwise binary operation.
    NodeId apply(Op op, NodeId f, NodeId g);
    /// The function `x_var ? hi : lo`; hi and lo may depend on x_var.
    NodeId ite_var(std::uint32_t var, NodeId hi, NodeId lo);

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t cache_entries() const { return cache_used_; }
    std::uint64_t cache_hits() const { return cache_hits_; }
    /// Drops every memoized apply result. Never changes any handle.
    void clear_cache();
    std::size_t memory_bytes() const;
    std::size_t peak_nodes() const { return nodes_.size(); }

    /// Cooperative budget check (time and memory); cheap to call often.
    void tick();

private:
    struct Node {
        std::uint32_t var;
        NodeId low;
        NodeId high;
        std::int64_t value;
    };
    struct CacheEntry {
        std::uint32_t tag;
        NodeId a;
        NodeId b;
        NodeId result;
    };
    static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;

    std::uint32_t check_var(VarId v) const;
    bool cache_lookup(std::uint32_t tag, NodeId a, NodeId b, NodeId& out);
    void cache_insert(std::uint32_t tag, NodeId a, NodeId b, NodeId result);
    void grow_unique();
    void grow_cache();
    void account();
    bool terminal_case(Op op, NodeId f, NodeId g, NodeId& out);

    std::uint32_t num_vars_;
    BudgetPtr budget_;
    std::vector<Node> nodes_;
    std::vector<NodeId> unique_;
    std::size_t unique_used_ = 0;
    std::vector<CacheEntry> cache_;
    std::size_t cache_used_ = 0;
    std::uint64_t cache_hits_ = 0;
    std::unordered_map<std::int64_t, NodeId> terminals_;
    std::int64_t charged_ = 0;
    std::uint32_t ticks_ = 0;
};

// Arithmetic ------------------------------------------------------------------

enum class AddOp { Plus, Minus, Times, Min, Max };

/// Pointwise arithmetic. Throws OverflowError if a terminal leaves int64.
Add add_apply(AddOp op, Add a, Add b);
inline Add operator+(Add a, Add b) { return add_apply(AddOp::Plus, a, b); }
inline Add operator-(Add a, Add b) { return add_apply(AddOp::Minus, a, b); }

Bdd operator&(Bdd a, Bdd b);
Bdd operator|(Bdd a, Bdd b);
Bdd operator^(Bdd a, Bdd b);
Bdd operator!(Bdd a);
Bdd bdd_ite(Bdd cond, Bdd then_bdd, Bdd else_bdd);

/// Conjunction of literals `vars[i] == values[i]`.
Bdd cube(Manager& m, std::span<const VarId> vars, std::span<const std::uint8_t> values);

/// 0/1 Add with the same truth table.
Add to_add(Bdd b);

enum class ThresholdMode { Greater, AbsGreater };

/// Maps terminal v to 1 iff v > g (Greater) or |v| > g (AbsGreater).
Bdd threshold_to_bdd(Add a, std::int64_t g, ThresholdMode mode);

/// True iff at most d of the pairs (varsA[i], varsB[i]) differ.
/// Throws std::invalid_argument on a length mismatch.
Bdd at_most_distance(Manager& m, std::span<const VarId> vars_a, std::span<const VarId> vars_b, std::uint32_t d);

using VarMap = std::vector<std::pair<VarId, VarId>>;

/// a with every variable `from` replaced by `to`. The mapping must be
/// injective and no target may already occur in `a` unless it is itself
/// renamed away. Throws std::invalid_argument otherwise.
Add substitute_vars(Add a, const VarMap& mapping);

/// Existential abstraction over `vars`.
Bdd exists_project(Bdd b, std::span<const VarId> vars);

/// Coudert-Madre restrict: agrees with `f` wherever `care` holds, usually
/// with fewer nodes. Used to drop paths that violate guard monotonicity.
Add restrict_to(Add f, Bdd care);

// Inspection ------------------------------------------------------------------

std::int64_t evaluate(Add a, std::span<const std::uint8_t> assignment);
bool evaluate(Bdd b, std::span<const std::uint8_t> assignment);

std::vector<VarId> support(Add a);
inline std::vector<VarId> support(Bdd b) { return support(Add(b.manager(), b.node())); }

/// Number of nodes reachable from the root (terminals included).
std::size_t dag_size(Add a);
inline std::size_t dag_size(Bdd b) { return dag_size(Add(b.manager(), b.node())); }

/// Sorted distinct terminal values reachable from the root.
std::vector<std::int64_t> terminal_values(Add a);

// Counting and sampling -------------------------------------------------------

/// Number of assignments to exactly the `universe` variables that satisfy b.
/// Throws std::invalid_argument if support(b) is not contained in universe.
BigInt count_models(Bdd b, std::span<const VarId> universe);

/// n independent uniform samples from Sol(b) over `universe`. Each sample is
/// indexed by VarId over the whole manager; variables outside the universe
/// stay 0. Throws std::invalid_argument if b is unsatisfiable.
std::vector<Assignment> sample_solutions(Bdd b, std::size_t n, std::span<const VarId> universe, Rng& rng);

/// Reusable sampler: the per-node counts are computed once.
class SolutionSampler {
public:
    SolutionSampler(Bdd b, std::span<const VarId> universe);

    const BigInt& total() const { return total_; }
    /// Writes one uniform solution into `out` (which must have num_vars
    /// entries); only universe positions are written.
    void draw(Rng& rng, std::span<std::uint8_t> out) const;

private:
    std::size_t rank_of(NodeId n) const;

    const Manager* mgr_;
    NodeId root_;
    std::vector<std::uint32_t> universe_;  // rank -> var
    std::vector<std::int64_t> rank_;       // var -> rank or -1
    std::unordered_map<NodeId, BigInt> count_;
    BigInt total_;
};

// Copy and export -------------------------------------------------------------

Add transfer(Add a, Manager& dst);
Bdd transfer(Bdd b, Manager& dst);

using VarLabeler = std::function<std::string(VarId)>;

/// Graphviz rendering: one record per node with its id and variable label,
/// terminals show their value.
std::string to_dot(Add a, const VarLabeler& label = {});
std::string to_dot(Bdd b, const VarLabeler& label = {});

} // namespace xcount::dd
