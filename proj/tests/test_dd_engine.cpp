#include "support.hpp"

#include "xcount/dd.hpp"
#include "xcount/encode.hpp"
#include "xcount/errors.hpp"
#include "xcount/random.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <map>
#include <thread>

using namespace xcount;
using namespace xcount::dd;

namespace {

std::vector<VarId> vars_upto(std::uint32_t n) {
    std::vector<VarId> out;
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(VarId{i});
    return out;
}

Assignment decode(std::uint64_t code, std::uint32_t n) {
    Assignment a(n);
    for (std::uint32_t i = 0; i < n; ++i) a[i] = static_cast<std::uint8_t>((code >> i) & 1U);
    return a;
}

std::vector<std::int64_t> table(Add a, std::uint32_t n) {
    std::vector<std::int64_t> out;
    for (std::uint64_t c = 0; c < (1ULL << n); ++c) out.push_back(evaluate(a, decode(c, n)));
    return out;
}

std::vector<bool> table(Bdd b, std::uint32_t n) {
    std::vector<bool> out;
    for (std::uint64_t c = 0; c < (1ULL << n); ++c) out.push_back(evaluate(b, decode(c, n)));
    return out;
}

Bdd random_bdd(Manager& m, std::uint32_t n, Rng& rng, int depth) {
    if (depth == 0 || rng() % 4 == 0) {
        const Bdd v = m.bdd_var(VarId{static_cast<std::uint32_t>(rng() % n)});
        return coin(rng) ? v : !v;
    }
    const Bdd a = random_bdd(m, n, rng, depth - 1);
    const Bdd b = random_bdd(m, n, rng, depth - 1);
    switch (rng() % 3) {
    case 0: return a & b;
    case 1: return a | b;
    default: return a ^ b;
    }
}

Bdd from_table(Manager& m, const std::vector<bool>& t, std::uint32_t n) {
    // Minterms in descending order so the construction differs from any
    // expression-based build.
    Bdd acc = m.bdd_false();
    const auto vars = vars_upto(n);
    for (std::uint64_t c = t.size(); c-- > 0;) {
        if (t[c]) acc = cube(m, vars, decode(c, n)) | acc;
    }
    return acc;
}

Add random_add(Manager& m, std::uint32_t n, Rng& rng, int depth) {
    if (depth == 0 || rng() % 3 == 0) {
        if (coin(rng)) return m.constant(static_cast<std::int64_t>(rng() % 21) - 10);
        const std::uint32_t v = static_cast<std::uint32_t>(rng() % n);
        const Add hi = m.constant(static_cast<std::int64_t>(rng() % 21) - 10);
        const Add lo = m.constant(static_cast<std::int64_t>(rng() % 21) - 10);
        return Add(m, m.ite_var(v, hi.node(), lo.node()));
    }
    const Add a = random_add(m, n, rng, depth - 1);
    const Add b = random_add(m, n, rng, depth - 1);
    return coin(rng) ? a + b : a - b;
}

double chi_square(const std::vector<std::uint64_t>& observed, double expected) {
    double stat = 0.0;
    for (const auto o : observed) stat += (static_cast<double>(o) - expected) * (static_cast<double>(o) - expected) / expected;
    return stat;
}

double chi_square_critical(std::size_t cells, double alpha) {
    boost::math::chi_squared dist(static_cast<double>(cells - 1));
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

} // namespace

TEST_CASE("terminals and hash consing") {
    Manager m(4);
    CHECK(m.constant(7) == m.constant(7));
    CHECK((m.constant(3) + m.constant(4)) == m.constant(7));
    const Add x = m.indicator(VarId{1});
    CHECK((x - x) == m.constant(0));
    CHECK(m.bdd_var(VarId{2}) == m.bdd_var(VarId{2}));
    CHECK((m.bdd_var(VarId{0}) & !m.bdd_var(VarId{0})).is_false());
    CHECK((m.bdd_var(VarId{0}) | !m.bdd_var(VarId{0})).is_true());
    CHECK_THROWS_AS(m.bdd_var(VarId{4}), std::out_of_range);
}

TEST_CASE("apply is memoized") {
    Manager m(6);
    Rng rng(5);
    const Add a = random_add(m, 6, rng, 5);
    const Add b = random_add(m, 6, rng, 5);
    const Add first = a + b;
    const auto hits = m.cache_hits();
    const Add second = a + b;
    CHECK(first == second);
    CHECK(m.cache_hits() > hits);
}

TEST_CASE("canonicity: equal truth tables iff equal handles") {
    Rng rng(11);
    Manager m(10);
    int equal_pairs = 0;
    for (int k = 0; k < 500; ++k) {
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 10);
        const Bdd a = random_bdd(m, n, rng, 4);
        const auto ta = table(a, n);
        const Bdd b = k % 2 == 0 ? from_table(m, ta, n) : random_bdd(m, n, rng, 4);
        const auto tb = table(b, n);
        REQUIRE((ta == tb) == (a == b));
        equal_pairs += ta == tb;
    }
    CHECK(equal_pairs >= 250);
}

TEST_CASE("apply agrees with pointwise arithmetic") {
    Rng rng(3);
    for (int k = 0; k < 60; ++k) {
        Manager m(8);
        const Add a = random_add(m, 8, rng, 5);
        const Add b = random_add(m, 8, rng, 5);
        const auto ta = table(a, 8);
        const auto tb = table(b, 8);
        const auto sum = table(a + b, 8);
        const auto diff = table(a - b, 8);
        const auto prod = table(add_apply(AddOp::Times, a, b), 8);
        const auto lo = table(add_apply(AddOp::Min, a, b), 8);
        const auto hi = table(add_apply(AddOp::Max, a, b), 8);
        for (std::size_t i = 0; i < ta.size(); ++i) {
            REQUIRE(sum[i] == ta[i] + tb[i]);
            REQUIRE(diff[i] == ta[i] - tb[i]);
            REQUIRE(prod[i] == ta[i] * tb[i]);
            REQUIRE(lo[i] == std::min(ta[i], tb[i]));
            REQUIRE(hi[i] == std::max(ta[i], tb[i]));
        }
    }
}

TEST_CASE("terminal overflow is reported") {
    Manager m(1);
    const Add big = m.constant(std::numeric_limits<std::int64_t>::max());
    CHECK_THROWS_AS(big + m.constant(1), OverflowError);
    CHECK_THROWS_AS(m.constant(std::numeric_limits<std::int64_t>::min()) - m.constant(1), OverflowError);
}

TEST_CASE("tree encoding") {
    const Ensemble e = test::load_fixture("fig1.json", 0);
    const GuardTable gt = build_guard_table(e);
    Manager m(static_cast<std::uint32_t>(gt.num_vars()));
    const Add t1 = tree_to_add(m, e.trees[0], gt);
    CHECK(terminal_values(t1) == std::vector<std::int64_t>{-30, 30, 35});
    const Add sum = t1 + tree_to_add(m, e.trees[1], gt);
    CHECK(evaluate(sum, Assignment{1, 1, 1, 1}) == 70);
    CHECK(evaluate(sum, Assignment{0, 1, 1, 1}) == -15);

    const Ensemble leaf = parse_ensemble(R"({"num_features": 1, "trees": [{"value": 7}]})");
    const GuardTable lgt = build_guard_table(leaf);
    Manager lm(1);
    const Add c = tree_to_add(lm, leaf.trees[0], lgt);
    CHECK(c.is_constant());
    CHECK(c.constant_value() == 7);
    CHECK(dag_size(c) == 1);

    // Every monotone region: the ADD sum equals the direct valuation.
    for (std::uint64_t code = 0; code < 16; ++code) {
        RegionAssignment b{decode(code, 4)};
        if (!b.is_monotone(gt)) continue;
        CHECK(evaluate(ensemble_to_add(m, e, gt), b.bits) == evaluate_region(e, gt, b));
    }

    const Ensemble other = parse_ensemble(R"({"num_features": 2, "trees": [{"feature": 0, "threshold": 99,
        "yes": {"value": 1}, "no": {"value": 2}}]})");
    CHECK_THROWS_AS(tree_to_add(m, other.trees[0], gt), std::invalid_argument);
}

TEST_CASE("thresholding") {
    Manager m(2);
    const Add a(m, m.ite_var(0, m.terminal(70), m.terminal(-15)));
    CHECK(threshold_to_bdd(a, 80, ThresholdMode::Greater).is_false());
    const Bdd abs60 = threshold_to_bdd(a, 60, ThresholdMode::AbsGreater);
    CHECK(abs60 == m.bdd_var(VarId{0}));
    const Bdd abs10 = threshold_to_bdd(a, 10, ThresholdMode::AbsGreater);
    CHECK(abs10.is_true());
    CHECK(threshold_to_bdd(m.constant(0), 0, ThresholdMode::Greater).is_false());
    CHECK(threshold_to_bdd(m.constant(0), 5, ThresholdMode::AbsGreater).is_false());
    CHECK(threshold_to_bdd(m.constant(std::numeric_limits<std::int64_t>::min()), 5, ThresholdMode::AbsGreater)
              .is_true());
}

TEST_CASE("monotone constraints") {
    const Ensemble e = load_ensemble(test::fixture("fig1.json"));
    const GuardTable gt = build_guard_table(e);
    Manager m(4);
    const Bdd f0 = monotone_constraint(m, gt, 0);
    const std::vector<VarId> block{VarId{0}, VarId{1}};
    CHECK(count_models(f0, block) == 3);
    for (std::uint64_t c = 0; c < 4; ++c) {
        const Assignment a = decode(c, 4);
        const bool suffix_ones = !(a[0] == 1 && a[1] == 0);
        CHECK(evaluate(f0, a) == suffix_ones);
    }
    const std::vector<std::uint32_t> both{0, 1};
    CHECK(count_models(monotone_constraint(m, gt, both), vars_upto(4)) == 9);

    const GuardTable egt = build_guard_table(load_ensemble(test::fixture("appendix_e.json")));
    Manager em(static_cast<std::uint32_t>(egt.num_vars()));
    std::vector<VarId> f2;
    for (std::size_t i = 0; i < 3; ++i) f2.push_back(VarId{static_cast<std::uint32_t>(egt.var_index(2, i))});
    CHECK(count_models(monotone_constraint(em, egt, 2), f2) == 4);
    CHECK(monotone_constraint(em, egt, 5).is_true());
}

TEST_CASE("distance constraint") {
    Manager m(4);
    const std::vector<VarId> a{VarId{0}, VarId{2}};
    const std::vector<VarId> b{VarId{1}, VarId{3}};
    const auto all = vars_upto(4);
    for (std::uint32_t d = 0; d <= 3; ++d) {
        const Bdd c = at_most_distance(m, a, b, d);
        std::uint64_t brute = 0;
        for (std::uint64_t code = 0; code < 16; ++code) {
            const Assignment x = decode(code, 4);
            const unsigned diff = (x[0] != x[1]) + (x[2] != x[3]);
            brute += diff <= d;
            CHECK(evaluate(c, x) == (diff <= d));
        }
        CHECK(count_models(c, all) == brute);
    }
    CHECK(count_models(at_most_distance(m, a, b, 0), all) == 4);
    CHECK(count_models(at_most_distance(m, a, b, 1), all) == 12);
    CHECK(at_most_distance(m, a, b, 2).is_true());
    const std::vector<VarId> shorter{VarId{1}};
    CHECK_THROWS_AS(at_most_distance(m, a, shorter, 1), std::invalid_argument);
}

TEST_CASE("variable substitution") {
    const Ensemble e = test::load_fixture("fig1.json", 0);
    const GuardTable gt = build_guard_table(e);
    // Layout with two spare variables after the four guards.
    Manager m(6);
    const Add sum = ensemble_to_add(m, e, gt);
    CHECK(substitute_vars(sum, {}) == sum);
    const VarMap to_primed{{VarId{0}, VarId{4}}, {VarId{1}, VarId{5}}};
    const Add renamed = substitute_vars(sum, to_primed);
    CHECK(evaluate(renamed, Assignment{0, 0, 1, 1, 1, 1}) == 70);
    CHECK(evaluate(renamed, Assignment{1, 1, 1, 1, 0, 1}) == -15);
    CHECK(substitute_vars(m.constant(5), to_primed) == m.constant(5));
    // Swapping two variables is injective on the support.
    const VarMap swap{{VarId{0}, VarId{1}}, {VarId{1}, VarId{0}}};
    CHECK(substitute_vars(substitute_vars(sum, swap), swap) == sum);
    const VarMap clash{{VarId{0}, VarId{2}}};
    CHECK_THROWS_AS(substitute_vars(sum, clash), std::invalid_argument);
}

TEST_CASE("existential projection matches brute force") {
    Rng rng(17);
    for (int k = 0; k < 100; ++k) {
        Manager m(8);
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng() % 7);
        const Bdd b = random_bdd(m, n, rng, 4);
        std::vector<VarId> q;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (coin(rng)) q.push_back(VarId{v});
        }
        const Bdd p = exists_project(b, q);
        for (const VarId v : support(p)) {
            REQUIRE(std::find(q.begin(), q.end(), v) == q.end());
        }
        for (std::uint64_t c = 0; c < (1ULL << n); ++c) {
            Assignment a = decode(c, 8);
            bool any = false;
            for (std::uint64_t s = 0; s < (1ULL << q.size()) && !any; ++s) {
                Assignment x = a;
                for (std::size_t i = 0; i < q.size(); ++i) x[q[i].index] = static_cast<std::uint8_t>((s >> i) & 1U);
                any = evaluate(b, x);
            }
            REQUIRE(evaluate(p, a) == any);
        }
    }
    Manager m(2);
    const Bdd differs = m.bdd_var(VarId{0}) ^ m.bdd_var(VarId{1});
    const std::vector<VarId> primed{VarId{1}};
    CHECK(exists_project(differs, primed).is_true());
    CHECK(exists_project(differs, {}) == differs);
    const std::vector<VarId> both{VarId{0}, VarId{1}};
    CHECK(exists_project(differs, both).is_true());
}

TEST_CASE("restrict agrees on the care set") {
    Rng rng(23);
    for (int k = 0; k < 50; ++k) {
        Manager m(7);
        const Add f = random_add(m, 7, rng, 5);
        const Bdd care = random_bdd(m, 7, rng, 3);
        const Add r = restrict_to(f, care);
        for (std::uint64_t c = 0; c < 128; ++c) {
            const Assignment a = decode(c, 7);
            if (evaluate(care, a)) REQUIRE(evaluate(r, a) == evaluate(f, a));
        }
    }
}

TEST_CASE("model counting matches enumeration") {
    Rng rng(29);
    for (int k = 0; k < 200; ++k) {
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 12);
        Manager m(12);
        const Bdd b = random_bdd(m, n, rng, 4);
        std::uint64_t brute = 0;
        for (std::uint64_t c = 0; c < (1ULL << n); ++c) brute += evaluate(b, decode(c, 12));
        REQUIRE(count_models(b, vars_upto(n)) == brute);
        REQUIRE(count_models(b, vars_upto(12)) == BigInt(brute) << (12 - n));
    }
    Manager m(4);
    CHECK(count_models(m.bdd_true(), vars_upto(4)) == 16);
    CHECK(count_models(m.bdd_false(), vars_upto(4)) == 0);
    const std::vector<VarId> only0{VarId{0}};
    CHECK_THROWS_AS(count_models(m.bdd_var(VarId{2}), only0), std::invalid_argument);

    Manager wide(200);
    CHECK(count_models(wide.bdd_true(), vars_upto(200)) == BigInt(1) << 200);
}

TEST_CASE("sampling returns models") {
    Rng rng(31);
    for (int k = 0; k < 50; ++k) {
        Manager m(9);
        const Bdd b = random_bdd(m, 9, rng, 4);
        if (b.is_false()) continue;
        for (const auto& s : sample_solutions(b, 50, vars_upto(9), rng)) REQUIRE(evaluate(b, s));
    }
    Manager m(2);
    const std::vector<VarId> only0{VarId{0}};
    for (const auto& s : sample_solutions(m.bdd_var(VarId{0}), 20, only0, rng)) CHECK(s[0] == 1);
    CHECK_THROWS_AS(sample_solutions(m.bdd_false(), 1, only0, rng), std::invalid_argument);
}

TEST_CASE("sampling is uniform") {
    Rng rng(37);
    SUBCASE("full cube over three variables") {
        Manager m(3);
        std::vector<std::uint64_t> hist(8, 0);
        for (const auto& s : sample_solutions(m.bdd_true(), 30000, vars_upto(3), rng)) {
            ++hist[s[0] | (s[1] << 1) | (s[2] << 2)];
        }
        CHECK(chi_square(hist, 3750.0) < chi_square_critical(8, 0.001));
    }
    SUBCASE("nine monotone regions") {
        const GuardTable gt = build_guard_table(load_ensemble(test::fixture("fig1.json")));
        Manager m(4);
        const std::vector<std::uint32_t> both{0, 1};
        const Bdd b = monotone_constraint(m, gt, both);
        std::map<std::vector<std::uint8_t>, std::uint64_t> hist;
        for (const auto& s : sample_solutions(b, 9000, vars_upto(4), rng)) ++hist[s];
        REQUIRE(hist.size() == 9);
        std::vector<std::uint64_t> counts;
        for (const auto& [k, v] : hist) counts.push_back(v);
        CHECK(chi_square(counts, 1000.0) < chi_square_critical(9, 0.001));
    }
}

TEST_CASE("clearing the cache never changes results") {
    Rng rng(41);
    Manager m(8);
    for (int k = 0; k < 40; ++k) {
        const Add a = random_add(m, 8, rng, 4);
        const Add b = random_add(m, 8, rng, 4);
        const Add before = a - b;
        m.clear_cache();
        CHECK(m.cache_entries() == 0);
        CHECK((a - b) == before);
    }
}

TEST_CASE("transfer and dot export") {
    Manager a(4);
    Manager b(4);
    const Bdd f = (a.bdd_var(VarId{0}) & a.bdd_var(VarId{3})) | a.bdd_var(VarId{2});
    const Bdd g = transfer(f, b);
    CHECK(table(f, 4) == table(g, 4));
    CHECK(&g.manager() == &b);
    Manager small(1);
    CHECK_THROWS_AS(transfer(f, small), std::out_of_range);
    const std::string dot = to_dot(f);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("x3") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
}

TEST_CASE("budgets are enforced") {
    SUBCASE("memory cap") {
        auto budget = make_budget(ResourceLimits{std::nullopt, 64 * 1024});
        CHECK_THROWS_AS(
            {
                Manager m(20, budget);
                Rng rng(1);
                Add acc = m.constant(0);
                for (std::uint32_t v = 0; v < 20; ++v) {
                    acc = acc + Add(m, m.ite_var(v, m.terminal(static_cast<std::int64_t>(1) << v), m.terminal(0)));
                }
            },
            MemoryLimitError);
        CHECK(budget->used_bytes() == 0);
    }
    SUBCASE("deadline") {
        auto budget = make_budget(ResourceLimits::from_seconds(1e-6, 0));
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        CHECK_THROWS_AS(
            {
                Manager m(20, budget);
                Add acc = m.constant(0);
                for (std::uint32_t v = 0; v < 20; ++v) {
                    acc = acc + Add(m, m.ite_var(v, m.terminal(static_cast<std::int64_t>(1) << v), m.terminal(0)));
                }
            },
            TimeoutError);
    }
}
