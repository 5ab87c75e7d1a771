#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "audb/gen.hpp"
#include "audb/relation.hpp"

using namespace audb;

namespace {

// Exhaustive search over allocations of world copies to bounding rows.
bool brute_bounds(const AuRelation& r, const BagRelation& w) {
    std::vector<std::pair<RangeTuple, MultTriple>> rows(r.rows().begin(), r.rows().end());
    std::vector<std::pair<Tuple, std::uint64_t>> tuples(w.rows().begin(), w.rows().end());
    std::vector<std::uint64_t> load(rows.size(), 0);
    std::function<bool(std::size_t, std::uint64_t)> go = [&](std::size_t ti, std::uint64_t left) -> bool {
        if (ti == tuples.size()) {
            for (std::size_t j = 0; j < rows.size(); ++j)
                if (load[j] < rows[j].second.lb || load[j] > rows[j].second.ub) return false;
            return true;
        }
        if (left == 0) return go(ti + 1, ti + 1 < tuples.size() ? tuples[ti + 1].second : 0);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (!tuple_bounded(rows[j].first, tuples[ti].first)) continue;
            ++load[j];
            bool ok = go(ti, left - 1);
            --load[j];
            if (ok) return true;
        }
        return false;
    };
    return go(0, tuples.empty() ? 0 : tuples[0].second);
}

}  // namespace

TEST(BoundsWorld, SimpleMatch) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    r.add({RangeValue(1.0, 2.0, 3.0)}, {1, 1, 2});
    BagRelation w(r.schema());
    w.add({2.0}, 2);
    EXPECT_TRUE(bounds_world(r, w));
    w.add({3.0}, 1);
    EXPECT_FALSE(bounds_world(r, w));
}

TEST(BoundsWorld, LowerBoundMustBeMet) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    r.add({RangeValue(1.0)}, {1, 1, 1});
    BagRelation empty(r.schema());
    EXPECT_FALSE(bounds_world(r, empty));
}

TEST(BoundsWorld, EmptyRelationBoundsEmptyWorld) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    EXPECT_TRUE(bounds_world(r, BagRelation(r.schema())));
    EXPECT_TRUE(bounds_incomplete(r, {BagRelation(r.schema())}));
}

TEST(BoundsWorld, AgreesWithExhaustiveAllocation) {
    gen::Rng rng(11);
    int checked = 0;
    for (int it = 0; it < 3000; ++it) {
        gen::RelationParams p{std::size_t(gen::uniform(rng, 0, 3)), 1, 4, 2, 0.5, 2};
        AuRelation r = gen::random_relation(rng, p);
        BagRelation w(r.schema());
        long n = gen::uniform(rng, 0, 3);
        for (long i = 0; i < n; ++i) w.add({double(gen::uniform(rng, -1, 4))}, std::uint64_t(gen::uniform(rng, 1, 2)));
        EXPECT_EQ(bounds_world(r, w), brute_bounds(r, w)) << r << "\n" << w;
        checked += bounds_world(r, w);
    }
    EXPECT_GT(checked, 100);
}

TEST(SgWorld, TakesMiddleComponents) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    r.add({RangeValue(1.0, 2.0, 3.0)}, {0, 2, 3});
    r.add({RangeValue(5.0)}, {0, 0, 1});
    BagRelation w = sg_world(r);
    EXPECT_EQ(w.size(), 1u);
    EXPECT_EQ(w.mult({2.0}), 2u);
}

TEST(AuRelation, MergesEqualRows) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    r.add({RangeValue(1.0)}, {1, 1, 1});
    r.add({RangeValue(1.0)}, {0, 1, 2});
    EXPECT_EQ(r.mult({RangeValue(1.0)}), (MultTriple{1, 2, 3}));
    EXPECT_THROW(r.add({RangeValue("x")}, MultTriple::one()), TypeError);
}

TEST(Schema, RejectsDuplicates) { EXPECT_THROW(Schema({{"A", Kind::Real}, {"A", Kind::Text}}), SchemaError); }
