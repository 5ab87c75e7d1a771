#include <gtest/gtest.h>

#include <random>

#include "audb/expr.hpp"

using namespace audb;

namespace {

RangeValue ev(const Expr& e, const std::map<std::string, RangeValue>& m) { return eval_range(e, map_env(m)); }

}  // namespace

TEST(EvalRange, LessThanExample) {
    std::map<std::string, RangeValue> env{{"A", RangeValue(1.0, 1.0, 3.0)}, {"B", RangeValue(2.0)}};
    RangeValue r = ev(lt(var("A"), var("B")), env);
    EXPECT_EQ(r, RangeValue(false, true, true));
}

TEST(EvalRange, Addition) {
    std::map<std::string, RangeValue> env{{"A", RangeValue(1.0, 2.0, 3.0)}, {"B", RangeValue(4.0, 4.0, 5.0)}};
    EXPECT_EQ(ev(add(var("A"), var("B")), env), RangeValue(5.0, 6.0, 8.0));
}

TEST(EvalRange, MultiplicationTakesCornerExtrema) {
    std::map<std::string, RangeValue> env{{"A", RangeValue(-2.0, 1.0, 3.0)}, {"B", RangeValue(-1.0, 2.0, 4.0)}};
    EXPECT_EQ(ev(mul(var("A"), var("B")), env), RangeValue(-8.0, 2.0, 12.0));
}

TEST(EvalRange, NegationSwapsBounds) {
    std::map<std::string, RangeValue> env{{"P", RangeValue(false, true, true)}};
    EXPECT_EQ(ev(neg(var("P")), env), RangeValue(false, false, true));
}

TEST(EvalRange, EqualityOfOverlappingRanges) {
    std::map<std::string, RangeValue> env{{"A", RangeValue(1.0, 2.0, 3.0)}, {"B", RangeValue(3.0, 3.0, 4.0)}};
    EXPECT_EQ(ev(eq(var("A"), var("B")), env), RangeValue(false, false, true));
    std::map<std::string, RangeValue> same{{"A", RangeValue(2.0)}, {"B", RangeValue(2.0)}};
    EXPECT_EQ(ev(eq(var("A"), var("B")), same), RangeValue(true));
}

TEST(EvalRange, IfWithUncertainConditionTakesHull) {
    std::map<std::string, RangeValue> env{{"P", RangeValue(false, true, true)}, {"A", RangeValue(1.0)}, {"B", RangeValue(5.0)}};
    EXPECT_EQ(ev(ite(var("P"), var("A"), var("B")), env), RangeValue(1.0, 1.0, 5.0));
}

TEST(EvalRange, TypeErrors) {
    std::map<std::string, RangeValue> env{{"A", RangeValue(1.0)}, {"S", RangeValue("x")}};
    EXPECT_THROW(ev(add(var("A"), var("S")), env), TypeError);
    EXPECT_THROW(ev(land(var("A"), var("A")), env), TypeError);
    EXPECT_THROW(ev(le(var("A"), var("S")), env), TypeError);
    EXPECT_THROW(ev(var("Q"), env), UnboundVariable);
}

TEST(EvalDet, Basics) {
    std::map<std::string, Scalar> env{{"A", 2.0}, {"B", 3.0}};
    EXPECT_EQ(eval_det(sub(var("A"), var("B")), map_env(env)), Scalar(-1.0));
    EXPECT_EQ(eval_det(ge(var("B"), var("A")), map_env(env)), Scalar(true));
    EXPECT_EQ(eval_det(ne(var("B"), var("B")), map_env(env)), Scalar(false));
}

// Random expressions over two real and one boolean variable; every grid valuation
// inside the input ranges must evaluate into the output range.
TEST(EvalRange, RandomExpressionsBoundGridValuations) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, 9);
    std::function<Expr(int)> num, pred;
    num = [&](int d) -> Expr {
        int c = d <= 0 ? pick(rng) % 2 : pick(rng) % 5;
        switch (c) {
        case 0: return var(pick(rng) % 2 ? "x" : "y");
        case 1: return cst(double(pick(rng) - 4));
        case 2: return add(num(d - 1), num(d - 1));
        case 3: return mul(num(d - 1), num(d - 1));
        default: return ite(pred(d - 1), num(d - 1), num(d - 1));
        }
    };
    pred = [&](int d) -> Expr {
        int c = d <= 0 ? pick(rng) % 3 : pick(rng) % 6;
        switch (c) {
        case 0: return var("p");
        case 1: return le(num(0), num(0));
        case 2: return eq(num(0), num(0));
        case 3: return neg(pred(d - 1));
        case 4: return land(pred(d - 1), pred(d - 1));
        default: return lor(pred(d - 1), pred(d - 1));
        }
    };
    for (int it = 0; it < 300; ++it) {
        Expr e = it % 2 ? num(3) : pred(3);
        double xl = pick(rng) - 5, xw = pick(rng) % 4, yl = pick(rng) - 5, yw = pick(rng) % 4;
        std::map<std::string, RangeValue> env{{"x", RangeValue(xl, xl, xl + xw)},
                                              {"y", RangeValue(yl, yl + yw, yl + yw)},
                                              {"p", RangeValue(false, true, true)}};
        RangeValue r = ev(e, env);
        for (double x = xl; x <= xl + xw; x += 0.5)
            for (double y = yl; y <= yl + yw; y += 0.5)
                for (bool p : {false, true}) {
                    std::map<std::string, Scalar> d{{"x", x}, {"y", y}, {"p", p}};
                    Scalar v = eval_det(e, map_env(d));
                    EXPECT_TRUE(value_bounds(r, v)) << to_string(e);
                }
        std::map<std::string, Scalar> sg{{"x", env["x"].sg}, {"y", env["y"].sg}, {"p", env["p"].sg}};
        EXPECT_EQ(r.sg, eval_det(e, map_env(sg))) << to_string(e);
    }
}
