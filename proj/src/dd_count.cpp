#include "xcount/dd.hpp"

#include <algorithm>
#include <stdexcept>

namespace xcount::dd {

SolutionSampler::SolutionSampler(Bdd b, std::span<const VarId> universe)
    : mgr_(&b.manager()), root_(b.node()) {
    const Manager& m = *mgr_;
    for (const VarId v : universe) {
        if (v.index >= m.num_vars()) throw std::out_of_range("universe variable outside manager");
        universe_.push_back(v.index);
    }
    std::sort(universe_.begin(), universe_.end());
    universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
    rank_.assign(m.num_vars(), -1);
    for (std::size_t r = 0; r < universe_.size(); ++r) rank_[universe_[r]] = static_cast<std::int64_t>(r);
    for (const VarId v : support(b)) {
        if (rank_[v.index] < 0) {
            throw std::invalid_argument("diagram depends on variable " + std::to_string(v.index) +
                                        " outside the counting universe");
        }
    }

    // count_[n] = models of n over the universe variables ranked at or below n.
    auto rec = [&](auto&& self, NodeId n) -> const BigInt& {
        if (auto it = count_.find(n); it != count_.end()) return it->second;
        BigInt c = 0;
        if (m.is_terminal(n)) {
            c = m.value(n) != 0 ? 1 : 0;
        } else {
            const std::size_t r = rank_of(n);
            const NodeId lo = m.low(n);
            const NodeId hi = m.high(n);
            const BigInt clo = self(self, lo);
            const BigInt chi = self(self, hi);
            c = (clo << (rank_of(lo) - r - 1)) + (chi << (rank_of(hi) - r - 1));
        }
        return count_.emplace(n, std::move(c)).first->second;
    };
    total_ = rec(rec, root_) << rank_of(root_);
}

std::size_t SolutionSampler::rank_of(NodeId n) const {
    return mgr_->is_terminal(n) ? universe_.size() : static_cast<std::size_t>(rank_[mgr_->var(n)]);
}

void SolutionSampler::draw(Rng& rng, std::span<std::uint8_t> out) const {
    if (total_ == 0) throw std::invalid_argument("cannot sample from an unsatisfiable diagram");
    if (out.size() < mgr_->num_vars()) throw std::invalid_argument("sample buffer too small");
    const Manager& m = *mgr_;
    std::size_t next = 0;
    auto fill_free = [&](std::size_t upto) {
        for (; next < upto; ++next) out[universe_[next]] = coin(rng) ? 1 : 0;
    };
    NodeId n = root_;
    fill_free(rank_of(n));
    while (!m.is_terminal(n)) {
        const std::size_t r = rank_of(n);
        const NodeId lo = m.low(n);
        const NodeId hi = m.high(n);
        const BigInt wlo = count_.at(lo) << (rank_of(lo) - r - 1);
        const BigInt whi = count_.at(hi) << (rank_of(hi) - r - 1);
        const bool take_high = uniform_below(rng, wlo + whi) >= wlo;
        out[universe_[r]] = take_high ? 1 : 0;
        next = r + 1;
        n = take_high ? hi : lo;
        fill_free(rank_of(n));
    }
}

BigInt count_models(Bdd b, std::span<const VarId> universe) {
    return SolutionSampler(b, universe).total();
}

std::vector<Assignment> sample_solutions(Bdd b, std::size_t n, std::span<const VarId> universe, Rng& rng) {
    const SolutionSampler sampler(b, universe);
    if (sampler.total() == 0) throw std::invalid_argument("cannot sample from an unsatisfiable diagram");
    std::vector<Assignment> out(n, Assignment(b.manager().num_vars(), 0));
    for (auto& a : out) sampler.draw(rng, a);
    return out;
}

} // namespace xcount::dd
