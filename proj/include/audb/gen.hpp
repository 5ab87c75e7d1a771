#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "expr.hpp"
#include "oracle.hpp"
#include "relation.hpp"

namespace audb::gen {

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct BenchParams {
    std::size_t rows = 50000;
    double uncertainty = 0.05;
    long range = 1000;
    long domain_per_row = 10;
    std::uint64_t seed = 1;
};

// Two real attributes A and B drawn uniformly from [0, rows * domain_per_row).
// A fraction of rows gets ranges of width up to `range` around the guess. Rows are
// inserted in key order so the relation is laid out in scan order.
inline AuRelation bench_relation(const BenchParams& p) {
    Rng rng(p.seed);
    const long dom = std::max<long>(1, long(p.rows) * p.domain_per_row);
    AuRelation r(Schema({{"A", Kind::Real}, {"B", Kind::Real}}));
    auto value = [&](bool unc) {
        long v = uniform(rng, 0, dom - 1);
        if (!unc) return RangeValue(double(v));
        long lo = v - uniform(rng, 0, p.range / 2), hi = lo + uniform(rng, 0, p.range);
        hi = std::max(hi, v);
        return RangeValue(double(lo), double(v), double(hi));
    };
    std::vector<RangeTuple> rows;
    rows.reserve(p.rows);
    for (std::size_t i = 0; i < p.rows; ++i) {
        bool unc = coin(rng, p.uncertainty);
        RangeValue a = value(unc), b = value(unc);
        rows.push_back({a, b});
    }
    std::sort(rows.begin(), rows.end(), RangeTupleLess());
    for (const auto& t : rows) r.add(t, MultTriple::one());
    return r;
}

struct RelationParams {
    std::size_t rows = 10;
    std::size_t attrs = 2;
    long domain = 10;
    long max_width = 4;
    double uncertainty = 0.3;
    std::uint64_t max_mult = 2;
};

inline MultTriple random_mult(Rng& rng, std::uint64_t max_ub) {
    std::uint64_t ub = std::uint64_t(uniform(rng, 1, long(max_ub)));
    std::uint64_t sg = std::uint64_t(uniform(rng, 0, long(ub)));
    std::uint64_t lb = std::uint64_t(uniform(rng, 0, long(sg)));
    return {lb, sg, ub};
}

// Attributes A0, A1, ... over small integer domains so that ties are frequent.
inline AuRelation random_relation(Rng& rng, const RelationParams& p) {
    std::vector<Attribute> attrs;
    for (std::size_t a = 0; a < p.attrs; ++a) attrs.push_back({"A" + std::to_string(a), Kind::Real});
    AuRelation r{Schema(attrs)};
    for (std::size_t i = 0; i < p.rows; ++i) {
        RangeTuple t;
        for (std::size_t a = 0; a < p.attrs; ++a) {
            long v = uniform(rng, 0, p.domain - 1);
            if (coin(rng, p.uncertainty)) {
                long lo = v - uniform(rng, 0, p.max_width), hi = v + uniform(rng, 0, p.max_width);
                t.emplace_back(double(lo), double(v), double(hi));
            } else {
                t.emplace_back(double(v));
            }
        }
        bool certain_mult = !coin(rng, p.uncertainty);
        r.add(std::move(t), certain_mult ? MultTriple::one() : random_mult(rng, p.max_mult));
    }
    return r;
}

struct SpecParams {
    std::size_t max_rows = 4;
    std::size_t attrs = 2;
    std::size_t max_choices = 3;
    long domain = 4;
    std::uint64_t max_worlds = 1000;
};

// Random product-mode spec whose world count stays within max_worlds.
inline IncompleteSpec random_spec(Rng& rng, const SpecParams& p, const std::string& prefix = "A") {
    for (;;) {
        IncompleteSpec s;
        std::vector<Attribute> attrs;
        for (std::size_t a = 0; a < p.attrs; ++a) attrs.push_back({prefix + std::to_string(a), Kind::Real});
        s.schema = Schema(attrs);
        std::size_t n = std::size_t(uniform(rng, 0, long(p.max_rows)));
        for (std::size_t i = 0; i < n; ++i) {
            TemplateRow row;
            for (std::size_t a = 0; a < p.attrs; ++a) {
                std::size_t c = coin(rng, 0.5) ? 1 : std::size_t(uniform(rng, 1, long(p.max_choices)));
                std::vector<Scalar> vals;
                for (std::size_t k = 0; k < c; ++k) vals.push_back(double(uniform(rng, 0, p.domain - 1)));
                row.values.push_back(std::move(vals));
            }
            if (coin(rng, 0.6)) {
                row.mults = {1};
            } else {
                std::vector<std::uint64_t> pool{0, 1, 2};
                std::shuffle(pool.begin(), pool.end(), rng);
                pool.resize(std::size_t(uniform(rng, 1, 3)));
                row.mults = pool;
            }
            for (auto& v : row.values) row.sg.push_back(std::size_t(uniform(rng, 0, long(v.size()) - 1)));
            row.sg.push_back(std::size_t(uniform(rng, 0, long(row.mults.size()) - 1)));
            s.rows.push_back(std::move(row));
        }
        if (world_count(s) <= p.max_worlds) return s;
    }
}

// Numeric (numeric = true) or boolean expression over reals x, y and boolean p.
inline Expr random_expr(Rng& rng, int depth, bool numeric) {
    std::function<Expr(int)> num, pred;
    num = [&](int d) -> Expr {
        switch (d <= 0 ? uniform(rng, 0, 1) : uniform(rng, 0, 5)) {
        case 0: return var(coin(rng, 0.5) ? "x" : "y");
        case 1: return cst(double(uniform(rng, -4, 5)));
        case 2: return add(num(d - 1), num(d - 1));
        case 3: return mul(num(d - 1), num(d - 1));
        case 4: return sub(num(d - 1), num(d - 1));
        default: return ite(pred(d - 1), num(d - 1), num(d - 1));
        }
    };
    pred = [&](int d) -> Expr {
        switch (d <= 0 ? uniform(rng, 0, 2) : uniform(rng, 0, 6)) {
        case 0: return var("p");
        case 1: return le(num(0), num(0));
        case 2: return eq(num(0), num(0));
        case 3: return neg(pred(d - 1));
        case 4: return land(pred(d - 1), pred(d - 1));
        case 5: return lt(num(d - 1), num(d - 1));
        default: return lor(pred(d - 1), pred(d - 1));
        }
    };
    return numeric ? num(depth) : pred(depth);
}

}  // namespace audb::gen
