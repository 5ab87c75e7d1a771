#include <gtest/gtest.h>

#include "audb/values.hpp"

using namespace audb;

TEST(RangeValue, RejectsUnorderedTriple) {
    EXPECT_THROW(RangeValue(2.0, 1.0, 3.0), InvalidRange);
    EXPECT_THROW(RangeValue(1.0, 4.0, 3.0), InvalidRange);
    EXPECT_NO_THROW(RangeValue(1.0, 1.0, 3.0));
}

TEST(RangeValue, RejectsMixedKinds) {
    EXPECT_THROW(RangeValue(Scalar(1.0), Scalar("a"), Scalar("b")), TypeError);
}

TEST(Scalar, CrossKindComparisonIsError) {
    EXPECT_THROW((void)(Scalar(1.0) < Scalar("1")), TypeError);
    EXPECT_THROW((void)(Scalar(true) == Scalar(1.0)), TypeError);
}

TEST(Scalar, TextUsesCodePointOrder) {
    EXPECT_LT(Scalar("Z"), Scalar("a"));
    EXPECT_LT(Scalar("\x7F"), Scalar("\xC3\xA9"));
    EXPECT_LT(Scalar("\xEF\xBF\xBF"), Scalar(text_top()));
    EXPECT_LT(Scalar(""), Scalar("a"));
}

TEST(Scalar, BoolOrder) { EXPECT_LT(Scalar(false), Scalar(true)); }

TEST(MultTriple, Validation) {
    EXPECT_THROW(MultTriple(2, 1, 3), InvalidRange);
    EXPECT_NO_THROW(MultTriple(0, 0, 0));
}

TEST(ValueBounds, Closed) {
    RangeValue v(1.0, 2.0, 3.0);
    EXPECT_TRUE(value_bounds(v, 1.0));
    EXPECT_TRUE(value_bounds(v, 3.0));
    EXPECT_FALSE(value_bounds(v, 3.5));
}

TEST(Combine, SumMultipliesBounds) {
    RangeValue r = combine({1, 2, 2}, RangeValue(3.0, 5.0, 10.0), Monoid::Sum);
    EXPECT_EQ(r, RangeValue(3.0, 10.0, 20.0));
}

TEST(Combine, MinIsIdempotentForNonzeroMultiplicity) {
    RangeValue r = combine({1, 2, 2}, RangeValue(3.0, 5.0, 10.0), Monoid::Min);
    EXPECT_EQ(r, RangeValue(3.0, 5.0, 10.0));
}

TEST(Combine, ZeroTimesInfinityIsZero) {
    RangeValue r = combine({0, 0, 1}, RangeValue(1.0, 1.0, kInf), Monoid::Sum);
    EXPECT_EQ(r.lb.real(), 0.0);
    EXPECT_EQ(r.sg.real(), 0.0);
    EXPECT_EQ(r.ub.real(), kInf);
}

TEST(Combine, AbsentCopyActsAsNeutralForMinAndMax) {
    RangeValue r = combine({0, 1, 1}, RangeValue(3.0, 5.0, 10.0), Monoid::Min);
    EXPECT_EQ(r.lb.real(), 3.0);
    EXPECT_EQ(r.ub.real(), kInf);
    RangeValue x = combine({0, 1, 1}, RangeValue(3.0, 5.0, 10.0), Monoid::Max);
    EXPECT_EQ(x.lb.real(), -kInf);
    EXPECT_EQ(x.ub.real(), 10.0);
}

// Brute force: every k in [k.lb, k.ub] and m on a grid in [m.lb, m.ub].
TEST(Combine, BoundsEveryScaledValue) {
    for (int kl = 0; kl <= 2; ++kl)
        for (int ku = kl; ku <= 3; ++ku)
            for (double ml = -2; ml <= 2; ml += 1)
                for (double mu = ml; mu <= 3; mu += 1.5) {
                    RangeValue m(ml, ml, mu);
                    MultTriple k{std::uint64_t(kl), std::uint64_t(kl), std::uint64_t(ku)};
                    RangeValue r = combine(k, m, Monoid::Sum);
                    for (int kk = kl; kk <= ku; ++kk)
                        for (double x = ml; x <= mu; x += 0.25) {
                            double v = kk * x;
                            EXPECT_LE(r.lb.real(), v);
                            EXPECT_GE(r.ub.real(), v);
                        }
                }
}
