#include <gtest/gtest.h>

#include "audb/algebra.hpp"
#include "audb/gen.hpp"
#include "audb/oracle.hpp"

using namespace audb;

namespace {

RangeValue rv(double l, double s, double u) { return RangeValue(l, s, u); }
RangeValue rt(const std::string& l, const std::string& s, const std::string& u) {
    return RangeValue(Scalar(l), Scalar(s), Scalar(u));
}

AuRelation sum_input() {
    AuRelation r(Schema({{"A", Kind::Real}, {"B", Kind::Real}}));
    r.add({rv(3, 5, 10), RangeValue(3.0)}, {1, 2, 2});
    r.add({rv(-4, -3, -3), rv(2, 3, 4)}, {1, 2, 2});
    return r;
}

// Street is unknown for the second row; its range spans the whole text domain.
AuRelation addresses() {
    AuRelation r(Schema({{"street", Kind::Text}, {"number", Kind::Real}, {"inhab", Kind::Real}}));
    r.add({RangeValue("Canal"), RangeValue(165.0), RangeValue(1.0)}, {1, 1, 2});
    r.add({rt("", "Canal", text_top()), rv(153, 154, 156), rv(1, 2, 2)}, {1, 1, 1});
    r.add({RangeValue("State"), rv(623, 623, 629), RangeValue(2.0)}, {2, 2, 3});
    r.add({RangeValue("Monroe"), rv(3550, 3574, 3585), rv(2, 3, 4)}, {0, 0, 1});
    return r;
}

}  // namespace

TEST(Aggregate, SumLowerBoundForUncertainGroup) {
    AuRelation out = aggregate(sum_input(), {"B"}, AggFunc::Sum, "A", "S");
    bool found = false;
    for (auto& [t, m] : out.rows())
        if (t[0].sg.real() == 3 && m.lb == 1) {
            found = true;
            EXPECT_EQ(t[1].lb.real(), -5);
            EXPECT_EQ(t[1].sg.real(), 4);
            EXPECT_EQ(t[1].ub.real(), 20);
        }
    EXPECT_TRUE(found) << out;
}

TEST(Aggregate, GroupByAddressCount) {
    AuRelation out = aggregate(addresses(), {"street"}, AggFunc::Count, "", "cnt");
    AuRelation want(Schema({{"street", Kind::Text}, {"cnt", Kind::Real}}));
    want.add({rt("", "Canal", text_top()), rv(1, 2, 3)}, {1, 1, 2});
    want.add({RangeValue("State"), rv(2, 2, 4)}, {1, 1, 1});
    want.add({RangeValue("Monroe"), rv(1, 1, 2)}, {0, 0, 1});
    EXPECT_EQ(out, want);
}

TEST(Aggregate, NoGroupByAlwaysOneRow) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    AuRelation out = aggregate(r, {}, AggFunc::Sum, "A", "S");
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out.rows().begin()->first[0], RangeValue(0.0));
}

TEST(Select, MultipliesByPredicateTriple) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    r.add({rv(1, 1, 3)}, {1, 1, 1});
    AuRelation out = select(r, lt(var("A"), cst(2.0)));
    EXPECT_EQ(out.mult({rv(1, 1, 3)}), (MultTriple{0, 1, 1}));
}

TEST(Join, RequiresDisjointNames) {
    AuRelation a(Schema({{"A", Kind::Real}}));
    EXPECT_THROW(join(a, a, cst(true)), SchemaError);
}

namespace {

// Runs a plan over random specs and checks every world is bounded.
void fuzz_plan(const nlohmann::json& plan, int instances, std::uint64_t seed, bool two = false) {
    gen::Rng rng(seed);
    Plan p = parse_plan(plan);
    for (int i = 0; i < instances; ++i) {
        DatabaseSpec db;
        gen::SpecParams sp;
        if (two) {
            sp.max_rows = 2;
            sp.max_worlds = 30;
            db.emplace("S", gen::random_spec(rng, sp, "B"));
        }
        db.emplace("R", gen::random_spec(rng, sp));
        CheckResult r = check_plan(p, db);
        ASSERT_TRUE(r.report.ok) << plan.dump() << "\n" << r.report.witness << "\n" << r.au;
    }
}

}  // namespace

TEST(Preservation, Select) {
    fuzz_plan(R"({"op":"select","input":{"op":"scan","input":"R"},
                  "pred":{"op":"<","args":[{"var":"A0"},{"var":"A1"}]}})"_json, 150, 1);
}

TEST(Preservation, Project) {
    fuzz_plan(R"({"op":"project","input":{"op":"scan","input":"R"},
                  "targets":[{"expr":{"op":"*","args":[{"var":"A0"},{"op":"-","args":[{"var":"A1"},{"const":2}]}]},"as":"X"}]})"_json,
              150, 2);
}

TEST(Preservation, Join) {
    fuzz_plan(R"({"op":"join","left":{"op":"scan","input":"R"},"right":{"op":"scan","input":"S"},
                  "pred":{"op":"=","args":[{"var":"A0"},{"var":"B0"}]}})"_json, 100, 3, true);
}

TEST(Preservation, Union) {
    fuzz_plan(R"({"op":"union","left":{"op":"scan","input":"R"},
                  "right":{"op":"select","input":{"op":"scan","input":"R"},"pred":{"op":">=","args":[{"var":"A0"},{"const":2}]}}})"_json,
              100, 4);
}

TEST(Preservation, AggregateEveryFunction) {
    int seed = 10;
    for (const char* f : {"sum", "count", "min", "max", "avg"}) {
        nlohmann::json g = {{"op", "aggregate"}, {"input", {{"op", "scan"}, {"input", "R"}}}, {"group_by", {"A0"}},
                            {"func", f}, {"attr", "A1"}, {"as", "X"}};
        fuzz_plan(g, 150, std::uint64_t(seed++));
        g["group_by"] = nlohmann::json::array();
        fuzz_plan(g, 100, std::uint64_t(seed++));
    }
}
