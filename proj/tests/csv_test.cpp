#include <gtest/gtest.h>

#include "audb/csv.hpp"
#include "audb/gen.hpp"

using namespace audb;

TEST(Csv, ReadsTriplesAndPlainColumns) {
    AuRelation r = read_au_csv_string("A,B__lb,B__sg,B__ub,_m__lb,_m__sg,_m__ub\n1,1,1,3,1,1,2\n2,15,15,15,0,1,1\n");
    EXPECT_EQ(r.schema().size(), 2u);
    EXPECT_EQ(r.mult({RangeValue(1.0), RangeValue(1.0, 1.0, 3.0)}), (MultTriple{1, 1, 2}));
    EXPECT_EQ(r.mult({RangeValue(2.0), RangeValue(15.0)}), (MultTriple{0, 1, 1}));
}

TEST(Csv, DefaultMultiplicityIsOne) {
    AuRelation r = read_au_csv_string("A\n1\n");
    EXPECT_EQ(r.mult({RangeValue(1.0)}), MultTriple::one());
}

TEST(Csv, RejectsInvalidTriples) {
    EXPECT_THROW(read_au_csv_string("A__lb,A__sg,A__ub\n3,2,4\n"), CsvError);
    EXPECT_THROW(read_au_csv_string("A,_m__lb,_m__sg,_m__ub\n1,2,1,3\n"), CsvError);
    EXPECT_THROW(read_au_csv_string("A,_m__lb,_m__sg,_m__ub\n1,-1,1,3\n"), CsvError);
    EXPECT_THROW(read_au_csv_string("A,_m__lb,_m__sg,_m__ub\n1,0.5,1,3\n"), CsvError);
    EXPECT_THROW(read_au_csv_string("A__lb,A__ub\n1,2\n"), CsvError);
    EXPECT_THROW(read_au_csv_string("A,B\n1\n"), CsvError);
}

TEST(Csv, TextWithCommasIsQuoted) {
    AuRelation r(Schema({{"S", Kind::Text}, {"N", Kind::Real}}));
    r.add({RangeValue("a, b"), RangeValue(1.0)}, MultTriple::one());
    r.add({RangeValue(Scalar(""), Scalar("x\"y"), Scalar(text_top())), RangeValue(2.0)}, {0, 0, 1});
    std::string s = au_csv_string(r);
    EXPECT_NE(s.find("\"a, b\""), std::string::npos);
    EXPECT_EQ(read_au_csv_string(s), r);
}

TEST(Csv, NumericLookingTextKeepsItsKind) {
    AuRelation r(Schema({{"S", Kind::Text}}));
    r.add({RangeValue("12")}, MultTriple::one());
    std::string s = au_csv_string(r);
    EXPECT_EQ(read_au_csv_string(s), r);
}

TEST(Csv, BoolColumns) {
    AuRelation r = read_au_csv_string("P__lb,P__sg,P__ub\nfalse,true,true\n");
    EXPECT_EQ(r.schema().attrs[0].kind, Kind::Bool);
    EXPECT_EQ(read_au_csv_string(au_csv_string(r)), r);
}

TEST(Csv, RandomRoundTrip) {
    gen::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        gen::RelationParams p{std::size_t(gen::uniform(rng, 0, 8)), 3, 20, 5, 0.4, 3};
        AuRelation r = gen::random_relation(rng, p);
        EXPECT_EQ(read_au_csv_string(au_csv_string(r)), r);
    }
}

TEST(Csv, RealFormattingRoundTrips) {
    AuRelation r(Schema({{"A", Kind::Real}}));
    r.add({RangeValue(0.1, 1.0 / 3.0, 1e300)}, MultTriple::one());
    r.add({RangeValue(-kInf, 0.0, kInf)}, MultTriple::one());
    EXPECT_EQ(read_au_csv_string(au_csv_string(r)), r);
}
