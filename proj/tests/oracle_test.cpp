#include <gtest/gtest.h>

#include <fstream>

#include "audb/gen.hpp"
#include "audb/oracle.hpp"

using namespace audb;

namespace {

nlohmann::json load(const std::string& name) {
    std::ifstream in(std::string(AUDB_DATA_DIR) + "/" + name);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Oracle, SalesSpecHasThreeWorlds) {
    DatabaseSpec db = parse_spec(load("sales_spec.json"));
    auto worlds = enumerate_worlds(db.at("sales"));
    ASSERT_EQ(worlds.size(), 3u);
    EXPECT_EQ(worlds[2].mult({5.0, 4.0}), 1u);
    EXPECT_EQ(worlds[1].mult({4.0, 6.0}), 1u);
    AuRelation au = derive_au(db.at("sales"));
    EXPECT_EQ(au.mult({RangeValue(3.0, 3.0, 5.0), RangeValue(4.0, 7.0, 7.0)}), MultTriple::one());
    EXPECT_TRUE(bounds_incomplete(au, worlds));
}

TEST(Oracle, DeterministicRollingSumInFirstWorld) {
    DatabaseSpec db = parse_spec(load("sales_spec.json"));
    auto worlds = enumerate_worlds(db.at("sales"));
    BagRelation out = det::window(worlds[0], AggFunc::Sum, "Sales", "Sum", {}, {{"Term"}}, 0, 1);
    EXPECT_EQ(out.mult({1.0, 2.0, 5.0}), 1u);
    EXPECT_EQ(out.mult({2.0, 3.0, 10.0}), 1u);
    EXPECT_EQ(out.mult({3.0, 7.0, 11.0}), 1u);
    EXPECT_EQ(out.mult({4.0, 4.0, 4.0}), 1u);
}

TEST(Oracle, RollingSumTightnessForFirstTerm) {
    DatabaseSpec db = parse_spec(load("sales_spec.json"));
    Plan p = parse_plan(load("rolling_sum.json"));
    CheckResult r = check_plan(p, db);
    ASSERT_TRUE(r.report.ok) << r.report.witness;
    TightBounds tb = tight_bounds(r.world_results, {"Term"}, "Sum");
    EXPECT_TRUE(tb.errors.empty());
    Interval tight = tb.value.at({1.0});
    EXPECT_EQ(tight.lo, 4);
    EXPECT_EQ(tight.hi, 5);
    Interval au{0, 0};
    for (auto& [t, m] : r.au.rows())
        if (t[0] == RangeValue(1.0)) au = {t[2].lb.real(), t[2].ub.real()};
    EXPECT_EQ(au.lo, 4);
    EXPECT_EQ(au.hi, 6);
    EXPECT_EQ(bound_accuracy(au, tight).value, 2);
    EXPECT_EQ(bound_recall(au, tight), 1);
}

TEST(Oracle, NativeEngineAlsoPreserves) {
    DatabaseSpec db = parse_spec(load("sales_spec.json"));
    EXPECT_TRUE(check_plan(parse_plan(load("rolling_sum.json")), db, Engine::Native).report.ok);
    EXPECT_TRUE(check_plan(parse_plan(load("top2_sales.json")), db, Engine::Native).report.ok);
}

TEST(Oracle, CorruptedResultIsCaught) {
    DatabaseSpec db = parse_spec(load("sales_spec.json"));
    CheckResult r = check_plan(parse_plan(load("rolling_sum.json")), db);
    AuRelation bad(r.au.schema());
    for (auto& [t, m] : r.au.rows()) {
        RangeTuple c = t;
        if (c[0] == RangeValue(1.0)) c[2] = RangeValue(5.0, 5.0, 6.0);
        bad.add(c, m);
    }
    PreservationReport rep = check_preservation(bad, r.world_results);
    EXPECT_FALSE(rep.ok);
    EXPECT_EQ(rep.failing_world, std::optional<std::size_t>(2));
    EXPECT_NE(rep.witness.find("no bounding row"), std::string::npos);
}

TEST(Oracle, SelectedGuessMustBeAWorld) {
    AuRelation au(Schema({{"A", Kind::Real}}));
    au.add({RangeValue(1.0, 2.0, 3.0)}, MultTriple::one());
    BagRelation w(au.schema());
    w.add({1.0}, 1);
    EXPECT_FALSE(check_preservation(au, {w}).ok);
}

TEST(Oracle, WorldCapIsEnforced) {
    gen::Rng rng(1);
    IncompleteSpec s;
    s.schema = Schema({{"A", Kind::Real}});
    for (int i = 0; i < 20; ++i) s.rows.push_back({{{0.0, 1.0}}, {1}, {0, 0}});
    EXPECT_EQ(world_count(s), 1u << 20);
    EXPECT_THROW(enumerate_worlds(s, 1000), OracleError);
}

TEST(Oracle, SpecValidation) {
    EXPECT_THROW(parse_spec(R"({"schema":["A"],"rows":[{"values":[[1,2]],"sg":[5,0]}]})"_json), OracleError);
    EXPECT_THROW(parse_spec(R"({"schema":["A"],"rows":[{"values":["x"]}]})"_json), OracleError);
    EXPECT_THROW(parse_spec(R"({"schema":["A"],"aligned":true,"rows":[{"values":[[1,2]]},{"values":[[1]]}]})"_json),
                 OracleError);
}

TEST(Oracle, DerivedRelationBoundsEveryWorld) {
    gen::Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        IncompleteSpec s = gen::random_spec(rng, {});
        AuRelation au = derive_au(s);
        auto ws = enumerate_worlds(s);
        ASSERT_TRUE(check_preservation(au, ws).ok);
    }
}

TEST(Metrics, RecallAndAccuracy) {
    EXPECT_EQ(bound_recall({4, 6}, {4, 5}), 1);
    EXPECT_EQ(bound_accuracy({4, 6}, {4, 5}).value, 2);
    EXPECT_EQ(bound_recall({4, 5}, {4, 5}), 1);
    EXPECT_EQ(bound_accuracy({4, 5}, {4, 5}).value, 1);
    EXPECT_EQ(bound_recall({4, 4.5}, {4, 5}), 0.5);
    EXPECT_EQ(bound_recall({3, 3}, {3, 3}), 1);
    EXPECT_EQ(bound_recall({2, 2}, {3, 3}), 0);
    EXPECT_TRUE(bound_accuracy({0, 1}, {2, 3}).disjoint);
}
