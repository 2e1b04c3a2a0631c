#include "xcount/dd.hpp"
#include "xcount/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace xcount::dd {

namespace {

constexpr std::size_t kInitialUnique = 1u << 12;
constexpr std::size_t kInitialCache = 1u << 12;

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = a * 0x9E3779B97F4A7C15ULL;
    h ^= (b + 0x632BE59BD9B4E019ULL) * 0xC2B2AE3D27D4EB4FULL;
    h ^= (c + 0x165667B19E3779F9ULL) * 0xD6E8FEB86659FD93ULL;
    h ^= h >> 32;
    h *= 0x9FB21C651E98DF25ULL;
    h ^= h >> 29;
    return h;
}

inline bool commutative(Op op) {
    switch (op) {
    case Op::Plus:
    case Op::Times:
    case Op::Min:
    case Op::Max:
    case Op::And:
    case Op::Or:
    case Op::Xor:
        return true;
    default:
        return false;
    }
}

std::int64_t checked(Op op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
    case Op::Plus:
        overflow = __builtin_add_overflow(a, b, &r);
        break;
    case Op::Minus:
        overflow = __builtin_sub_overflow(a, b, &r);
        break;
    case Op::Times:
        overflow = __builtin_mul_overflow(a, b, &r);
        break;
    case Op::Min:
        r = std::min(a, b);
        break;
    case Op::Max:
        r = std::max(a, b);
        break;
    case Op::And:
        r = (a != 0 && b != 0) ? 1 : 0;
        break;
    case Op::Or:
        r = (a != 0 || b != 0) ? 1 : 0;
        break;
    case Op::Xor:
        r = ((a != 0) != (b != 0)) ? 1 : 0;
        break;
    case Op::IteVar:
        throw std::logic_error("IteVar has no terminal semantics");
    }
    if (overflow) throw OverflowError("decision diagram terminal overflows int64");
    return r;
}

} // namespace

Manager::Manager(std::uint32_t num_vars, BudgetPtr budget)
    : num_vars_(num_vars), budget_(std::move(budget)) {
    if (num_vars >= (1u << 24)) throw std::invalid_argument("variable universe too large");
    nodes_.reserve(1024);
    unique_.assign(kInitialUnique, kEmpty);
    cache_.assign(kInitialCache, CacheEntry{kEmpty, 0, 0, 0});
    // Terminals 0 and 1 always exist, so Bdd constants have stable ids.
    terminal(0);
    terminal(1);
    try {
        account();
    } catch (...) {
        if (budget_) budget_->charge(-charged_);
        throw;
    }
}

Manager::~Manager() {
    if (budget_) budget_->charge(-charged_);
}

std::uint32_t Manager::check_var(VarId v) const {
    if (v.index >= num_vars_) {
        throw std::out_of_range("variable " + std::to_string(v.index) + " outside manager universe");
    }
    return v.index;
}

NodeId Manager::terminal(std::int64_t value) {
    auto it = terminals_.find(value);
    if (it != terminals_.end()) return it->second;
    const auto id = static_cast<NodeId>(nodes_.size());
    const auto cap = nodes_.capacity();
    nodes_.push_back(Node{kTerminalVar, 0, 0, value});
    terminals_.emplace(value, id);
    if (nodes_.capacity() != cap) account();
    return id;
}

NodeId Manager::node(std::uint32_t v, NodeId lo, NodeId hi) {
    if (lo == hi) return lo;
    const std::size_t mask = unique_.size() - 1;
    std::size_t idx = hash3(v, lo, hi) & mask;
    while (unique_[idx] != kEmpty) {
        const Node& n = nodes_[unique_[idx]];
        if (n.var == v && n.low == lo && n.high == hi) return unique_[idx];
        idx = (idx + 1) & mask;
    }
    if (nodes_.size() >= kEmpty - 1) throw MemoryLimitError("node id space exhausted");
    const auto id = static_cast<NodeId>(nodes_.size());
    const auto cap = nodes_.capacity();
    nodes_.push_back(Node{v, lo, hi, 0});
    unique_[idx] = id;
    ++unique_used_;
    bool grew = nodes_.capacity() != cap;
    if (unique_used_ * 2 > unique_.size()) {
        grow_unique();
        grew = true;
    }
    if (grew) account();
    return id;
}

void Manager::grow_unique() {
    std::vector<NodeId> fresh(unique_.size() * 2, kEmpty);
    const std::size_t mask = fresh.size() - 1;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        if (n.var == kTerminalVar) continue;
        std::size_t idx = hash3(n.var, n.low, n.high) & mask;
        while (fresh[idx] != kEmpty) idx = (idx + 1) & mask;
        fresh[idx] = id;
    }
    unique_.swap(fresh);
}

bool Manager::cache_lookup(std::uint32_t tag, NodeId a, NodeId b, NodeId& out) {
    const std::size_t mask = cache_.size() - 1;
    std::size_t idx = hash3(tag, a, b) & mask;
    while (cache_[idx].tag != kEmpty) {
        const CacheEntry& e = cache_[idx];
        if (e.tag == tag && e.a == a && e.b == b) {
            out = e.result;
            ++cache_hits_;
            return true;
        }
        idx = (idx + 1) & mask;
    }
    return false;
}

void Manager::cache_insert(std::uint32_t tag, NodeId a, NodeId b, NodeId result) {
    if ((cache_used_ + 1) * 2 > cache_.size()) grow_cache();
    const std::size_t mask = cache_.size() - 1;
    std::size_t idx = hash3(tag, a, b) & mask;
    while (cache_[idx].tag != kEmpty) {
        const CacheEntry& e = cache_[idx];
        if (e.tag == tag && e.a == a && e.b == b) return;
        idx = (idx + 1) & mask;
    }
    cache_[idx] = CacheEntry{tag, a, b, result};
    ++cache_used_;
}

void Manager::grow_cache() {
    std::vector<CacheEntry> fresh(cache_.size() * 2, CacheEntry{kEmpty, 0, 0, 0});
    const std::size_t mask = fresh.size() - 1;
    for (const CacheEntry& e : cache_) {
        if (e.tag == kEmpty) continue;
        std::size_t idx = hash3(e.tag, e.a, e.b) & mask;
        while (fresh[idx].tag != kEmpty) idx = (idx + 1) & mask;
        fresh[idx] = e;
    }
    cache_.swap(fresh);
    account();
}

void Manager::clear_cache() {
    std::vector<CacheEntry>(kInitialCache, CacheEntry{kEmpty, 0, 0, 0}).swap(cache_);
    cache_used_ = 0;
    if (budget_) {
        const auto now = static_cast<std::int64_t>(memory_bytes());
        budget_->charge(now - charged_);
        charged_ = now;
    }
}

std::size_t Manager::memory_bytes() const {
    return nodes_.capacity() * sizeof(Node) + unique_.size() * sizeof(NodeId) +
           cache_.size() * sizeof(CacheEntry) + terminals_.size() * 48;
}

void Manager::account() {
    if (!budget_) return;
    const auto now = static_cast<std::int64_t>(memory_bytes());
    budget_->charge(now - charged_);
    charged_ = now;
    if (budget_->over_cap()) {
        // The memo is the only thing that can be dropped without changing
        // results.
        if (cache_used_ > 0) clear_cache();
        if (budget_->over_cap()) {
            throw MemoryLimitError("memory cap exceeded (" + std::to_string(budget_->used_bytes()) +
                                   " bytes in use)");
        }
    }
}

void Manager::tick() {
    if (budget_ && (++ticks_ & 0x3FFu) == 0) budget_->check_time();
}

bool Manager::terminal_case(Op op, NodeId f, NodeId g, NodeId& out) {
    const bool ft = is_terminal(f);
    const bool gt = is_terminal(g);
    if (ft && gt) {
        out = terminal(checked(op, value(f), value(g)));
        return true;
    }
    switch (op) {
    case Op::Plus:
        if (ft && value(f) == 0) return out = g, true;
        if (gt && value(g) == 0) return out = f, true;
        break;
    case Op::Minus:
        if (gt && value(g) == 0) return out = f, true;
        if (f == g) return out = terminal(0), true;
        break;
    case Op::Times:
        if ((ft && value(f) == 0) || (gt && value(g) == 0)) return out = terminal(0), true;
        if (ft && value(f) == 1) return out = g, true;
        if (gt && value(g) == 1) return out = f, true;
        break;
    case Op::Min:
    case Op::Max:
        if (f == g) return out = f, true;
        break;
    case Op::And:
        if (ft) return out = (value(f) == 0 ? f : g), true;
        if (gt) return out = (value(g) == 0 ? g : f), true;
        if (f == g) return out = f, true;
        break;
    case Op::Or:
        if (ft) return out = (value(f) != 0 ? f : g), true;
        if (gt) return out = (value(g) != 0 ? g : f), true;
        if (f == g) return out = f, true;
        break;
    case Op::Xor:
        if (ft && value(f) == 0) return out = g, true;
        if (gt && value(g) == 0) return out = f, true;
        if (f == g) return out = terminal(0), true;
        break;
    case Op::IteVar:
        break;
    }
    return false;
}

NodeId Manager::apply(Op op, NodeId f, NodeId g) {
    NodeId out = 0;
    if (terminal_case(op, f, g, out)) return out;
    if (commutative(op) && f > g) std::swap(f, g);
    const auto tag = static_cast<std::uint32_t>(op);
    if (cache_lookup(tag, f, g, out)) return out;
    tick();

    const std::uint32_t vf = var(f);
    const std::uint32_t vg = var(g);
    const std::uint32_t top = std::min(vf, vg);
    const NodeId f0 = vf == top ? low(f) : f;
    const NodeId f1 = vf == top ? high(f) : f;
    const NodeId g0 = vg == top ? low(g) : g;
    const NodeId g1 = vg == top ? high(g) : g;

    const NodeId lo = apply(op, f0, g0);
    const NodeId hi = apply(op, f1, g1);
    out = node(top, lo, hi);
    cache_insert(tag, f, g, out);
    return out;
}

NodeId Manager::ite_var(std::uint32_t v, NodeId hi, NodeId lo) {
    if (hi == lo) return hi;
    const std::uint32_t vh = var(hi);
    const std::uint32_t vl = var(lo);
    const std::uint32_t top = std::min({v, vh, vl});
    if (top == v) {
        const NodeId h1 = vh == v ? high(hi) : hi;
        const NodeId l0 = vl == v ? low(lo) : lo;
        return node(v, l0, h1);
    }
    const std::uint32_t tag = static_cast<std::uint32_t>(Op::IteVar) | (v << 8);
    NodeId out = 0;
    if (cache_lookup(tag, hi, lo, out)) return out;
    tick();
    const NodeId h0 = vh == top ? low(hi) : hi;
    const NodeId h1 = vh == top ? high(hi) : hi;
    const NodeId l0 = vl == top ? low(lo) : lo;
    const NodeId l1 = vl == top ? high(lo) : lo;
    const NodeId r0 = ite_var(v, h0, l0);
    const NodeId r1 = ite_var(v, h1, l1);
    out = node(top, r0, r1);
    cache_insert(tag, hi, lo, out);
    return out;
}

} // namespace xcount::dd
