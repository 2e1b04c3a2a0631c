#include "support.hpp"

#include "xcount/errors.hpp"
#include "xcount/generator.hpp"
#include "xcount/random.hpp"

#include <doctest.h>

#include <limits>

using namespace xcount;

TEST_CASE("parse the two-tree fixture") {
    const Ensemble e = load_ensemble(test::fixture("fig1.json"));
    CHECK(e.trees.size() == 2);
    CHECK(e.num_leaves() == 6);
    CHECK(e.num_features == 2);
    CHECK(e.max_depth() == 2);
}

TEST_CASE("leaf-only tree has constant value") {
    const Ensemble e = parse_ensemble(R"({"num_features": 1, "trees": [{"value": 0}]})");
    REQUIRE(e.trees.size() == 1);
    const GuardTable gt = build_guard_table(e);
    CHECK(gt.num_vars() == 0);
    CHECK(evaluate_region(e, gt, RegionAssignment{}) == 0);
}

TEST_CASE("malformed documents are rejected") {
    SUBCASE("missing no child") {
        try {
            parse_ensemble(R"({"num_features": 1, "trees": [{"feature": 0, "threshold": 1, "yes": {"value": 1}}]})");
            FAIL("expected a parse error");
        } catch (const ParseError& ex) {
            CHECK(std::string(ex.what()).find("malformed node") != std::string::npos);
        }
    }
    SUBCASE("feature out of range") {
        CHECK_THROWS_AS(parse_ensemble(R"({"num_features": 1, "trees": [{"feature": 1, "threshold": 1,
            "yes": {"value": 1}, "no": {"value": 2}}]})"),
                        ParseError);
    }
    SUBCASE("no trees") { CHECK_THROWS_AS(parse_ensemble(R"({"num_features": 1, "trees": []})"), ParseError); }
    SUBCASE("not json") { CHECK_THROWS_AS(parse_ensemble("{"), ParseError); }
    SUBCASE("non-numeric leaf") {
        CHECK_THROWS_AS(parse_ensemble(R"({"num_features": 1, "trees": [{"value": "x"}]})"), ParseError);
    }
}

TEST_CASE("both comparison spellings parse as strict") {
    const Ensemble a = parse_ensemble(R"({"num_features": 1, "trees": [{"feature": 0, "threshold": 1, "op": "<=",
        "yes": {"value": 1}, "no": {"value": 2}}]})");
    const Ensemble b = parse_ensemble(R"({"num_features": 1, "trees": [{"feature": 0, "threshold": 1,
        "yes": {"value": 1}, "no": {"value": 2}}]})");
    CHECK(a.trees[0].same_structure(b.trees[0]));
    const double at_threshold[] = {1.0};
    CHECK(a.predict(at_threshold) == 2.0);
}

TEST_CASE("quantization rounds half away from zero on the decimal form") {
    CHECK(scale_decimal(0.1234, 3) == 123);
    CHECK(scale_decimal(30, 0) == 30);
    CHECK(scale_decimal(-0.0005, 3) == -1);
    CHECK(scale_decimal(0.0015, 3) == 2);
    CHECK(scale_decimal(-0.0015, 3) == -2);
    CHECK(scale_decimal(2.5, 0) == 3);
    CHECK(scale_decimal(-2.5, 0) == -3);
    CHECK(scale_decimal(1e-12, 3) == 0);
    CHECK(scale_decimal_floor(0.1, 3) == 100);
    CHECK(scale_decimal_floor(0.1005, 3) == 100);
    CHECK(scale_decimal_floor(2, 3) == 2000);

    const Ensemble e = parse_ensemble(R"({"num_features": 1, "trees": [{"value": 0.1234}]})");
    const Ensemble q = quantize_leaves(e, 3);
    CHECK(q.trees[0].nodes[0].scaled == 123);
    CHECK(q.leaf_scale == 1000);
    CHECK(q.precision == 3);
    CHECK_THROWS_AS(quantize_leaves(e, 10), ConfigError);
    CHECK_THROWS_AS(quantize_leaves(e, -1), ConfigError);

    CHECK_THROWS_AS(parse_ensemble(R"({"num_features": 1, "trees": [{"value": 1e300}]})"), ParseError);
    const Ensemble big = parse_ensemble(R"({"num_features": 1, "trees": [{"value": 1e16}]})");
    CHECK_THROWS_AS(quantize_leaves(big, 3), OverflowError);
}

TEST_CASE("guard table layout") {
    SUBCASE("two-tree fixture") {
        const GuardTable gt = build_guard_table(load_ensemble(test::fixture("fig1.json")));
        CHECK(gt.num_vars() == 4);
        REQUIRE(gt.count(0) == 2);
        REQUIRE(gt.count(1) == 2);
        CHECK(gt.thresholds(0)[0] == 3.0);
        CHECK(gt.thresholds(0)[1] == 4.0);
        CHECK(gt.thresholds(1)[0] == 2.0);
        CHECK(gt.thresholds(1)[1] == 3.0);
        CHECK(gt.var_index(0, 0) == 0);
        CHECK(gt.var_index(1, 1) == 3);
        CHECK(gt.feature_of(2) == 1);
        CHECK(gt.position_of(3) == 1);
        CHECK(gt.num_regions() == 9);
        CHECK(gt.find(Guard{1, 3.0}) == std::optional<std::size_t>(3));
        CHECK_FALSE(gt.find(Guard{1, 5.0}).has_value());
    }
    SUBCASE("three guards on one feature") {
        const GuardTable gt = build_guard_table(load_ensemble(test::fixture("appendix_e.json")));
        REQUIRE(gt.count(2) == 3);
        CHECK(gt.thresholds(2)[0] == 0.005);
        CHECK(gt.thresholds(2)[1] == 0.009);
        CHECK(gt.thresholds(2)[2] == 0.073);
        CHECK(gt.count(5) == 0);
        CHECK(gt.num_features() == 10);
    }
    SUBCASE("identical documents give identical layouts") {
        GenConfig cfg;
        cfg.seed = 99;
        const auto doc = to_json(generate_ensemble(cfg));
        CHECK(build_guard_table(parse_ensemble(doc)) == build_guard_table(parse_ensemble(doc)));
    }
}

TEST_CASE("region encoding of numeric inputs") {
    const GuardTable gt = build_guard_table(load_ensemble(test::fixture("fig1.json")));
    SUBCASE("mid point") {
        const double x[] = {3.5, 2.5};
        const RegionAssignment b = encode_input(gt, x);
        // Computed directly from the thresholds: 3.5<3, 3.5<4, 2.5<2, 2.5<3.
        CHECK(b.bits == std::vector<std::uint8_t>{0, 1, 0, 1});
        CHECK(b.is_monotone(gt));
    }
    SUBCASE("above every threshold") {
        const double x[] = {1e9, 1e9};
        CHECK(encode_input(gt, x).bits == std::vector<std::uint8_t>{0, 0, 0, 0});
    }
    SUBCASE("below every threshold") {
        const double x[] = {-10, -10};
        CHECK(encode_input(gt, x).bits == std::vector<std::uint8_t>{1, 1, 1, 1});
    }
    SUBCASE("non-monotone assignment detected") {
        CHECK_FALSE(RegionAssignment{{1, 0, 0, 0}}.is_monotone(gt));
    }
}

TEST_CASE("region valuation on the two-tree fixture") {
    const Ensemble e = load_ensemble(test::fixture("fig1.json"));
    const GuardTable gt = build_guard_table(e);
    CHECK(evaluate_region(e, gt, RegionAssignment{{0, 1, 1, 1}}) == -15);
    CHECK(evaluate_region(e, gt, RegionAssignment{{1, 1, 1, 1}}) == 70);
    CHECK(evaluate_region(e, gt, RegionAssignment{{0, 0, 0, 0}}) == 35 - 45);
}

TEST_CASE("valuation of encoded inputs equals direct evaluation") {
    Rng rng(2024);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GenConfig cfg;
        cfg.trees = 4;
        cfg.depth = 3;
        cfg.features = 3;
        cfg.guards_per_feature = 3;
        cfg.seed = seed;
        const Ensemble e = quantize_leaves(generate_ensemble(cfg), 3);
        const GuardTable gt = build_guard_table(e);
        for (int k = 0; k < 50; ++k) {
            std::vector<double> x(cfg.features);
            for (auto& v : x) v = uniform01(rng) * 1.2 - 0.1;
            if (k % 5 == 0) x[0] = gt.thresholds(0)[0];
            const RegionAssignment b = encode_input(gt, x);
            REQUIRE(b.is_monotone(gt));
            REQUIRE(evaluate_region(e, gt, b) == e.predict_scaled(x));
        }
    }
}

TEST_CASE("json round trip") {
    const Ensemble e = load_ensemble(test::fixture("appendix_e.json"));
    const Ensemble back = parse_ensemble(to_json(e));
    REQUIRE(back.trees.size() == e.trees.size());
    for (std::size_t i = 0; i < e.trees.size(); ++i) CHECK(back.trees[i].same_structure(e.trees[i]));
    CHECK(to_json(back) == to_json(e));
}

TEST_CASE("valuation overflow is reported") {
    Ensemble e = parse_ensemble(R"({"num_features": 1, "trees": [{"value": 1}, {"value": 1}]})");
    e.trees[0].nodes[0].scaled = std::numeric_limits<std::int64_t>::max();
    const GuardTable gt = build_guard_table(e);
    CHECK_THROWS_AS(evaluate_region(e, gt, RegionAssignment{}), OverflowError);
}
