#pragma once

#include <map>
#include <string>
#include <vector>

#include "det.hpp"
#include "relation.hpp"

namespace audb {

inline AuRelation select(const AuRelation& r, const Expr& pred) {
    if (expr_kind(pred, r.schema()) != Kind::Bool) throw TypeError("selection predicate is not boolean");
    AuRelation out(r.schema());
    for (auto& [t, m] : r.rows()) {
        RangeBool b = to_range_bool(eval_range(pred, tuple_env(r.schema(), t)));
        out.add(t, m * b.mult());
    }
    return out;
}

inline AuRelation project(const AuRelation& r, const std::vector<Target>& targets) {
    AuRelation out(project_schema(r.schema(), targets));
    for (auto& [t, m] : r.rows()) {
        RangeTuple o;
        for (auto& tg : targets) o.push_back(eval_range(tg.expr, tuple_env(r.schema(), t)));
        out.add(std::move(o), m);
    }
    return out;
}

inline AuRelation join(const AuRelation& a, const AuRelation& b, const Expr& pred) {
    Schema s = det::concat(a.schema(), b.schema());
    if (expr_kind(pred, s) != Kind::Bool) throw TypeError("join predicate is not boolean");
    AuRelation out(s);
    for (auto& [ta, ma] : a.rows())
        for (auto& [tb, mb] : b.rows()) {
            RangeTuple t = ta;
            t.insert(t.end(), tb.begin(), tb.end());
            RangeBool c = to_range_bool(eval_range(pred, tuple_env(s, t)));
            out.add(std::move(t), ma * mb * c.mult());
        }
    return out;
}

inline AuRelation au_union(const AuRelation& a, const AuRelation& b) {
    if (!(a.schema() == b.schema())) throw SchemaError("union inputs have different schemas");
    AuRelation out = a;
    for (auto& [t, m] : b.rows()) out.add(t, m);
    return out;
}

namespace agg_detail {

struct Bounds {
    double lo, hi;
};

inline Monoid monoid_of(AggFunc f) {
    switch (f) {
    case AggFunc::Min: return Monoid::Min;
    case AggFunc::Max: return Monoid::Max;
    default: return Monoid::Sum;
    }
}

struct Member {
    const MultTriple* k;
    const RangeValue* v;
    bool certain;
};

inline Bounds monoid_bounds(const std::vector<Member>& ms, Monoid mo) {
    double n = monoid_neutral(mo);
    Bounds b{n, n};
    for (auto& m : ms) {
        RangeValue c = combine(*m.k, *m.v, mo);
        double lo = c.lb.real(), hi = c.ub.real();
        if (!m.certain) {
            lo = std::min(n, lo);
            hi = std::max(n, hi);
        }
        b.lo = monoid_add(mo, b.lo, lo);
        b.hi = monoid_add(mo, b.hi, hi);
    }
    return b;
}

inline Bounds divide(Bounds s, Bounds c) {
    double q[4] = {s.lo / c.lo, s.lo / c.hi, s.hi / c.lo, s.hi / c.hi};
    Bounds r{q[0], q[0]};
    for (double x : q) {
        r.lo = std::min(r.lo, x);
        r.hi = std::max(r.hi, x);
    }
    return r;
}

// Bounds of f over a candidate membership. Count bounds are clamped to 1 when the
// group is known to be non-empty.
inline Bounds scenario(const std::vector<Member>& ms, const std::vector<Member>& ones, AggFunc f, bool nonempty) {
    switch (f) {
    case AggFunc::Sum: return monoid_bounds(ms, Monoid::Sum);
    case AggFunc::Min: return monoid_bounds(ms, Monoid::Min);
    case AggFunc::Max: return monoid_bounds(ms, Monoid::Max);
    case AggFunc::Count: {
        Bounds c = monoid_bounds(ones, Monoid::Sum);
        if (nonempty) c.lo = std::max(1.0, c.lo);
        return c;
    }
    case AggFunc::Avg: {
        Bounds s = monoid_bounds(ms, Monoid::Sum);
        Bounds c = monoid_bounds(ones, Monoid::Sum);
        bool maybe_empty = !nonempty && c.lo < 1;
        c.lo = std::max(1.0, c.lo);
        if (c.hi < 1) return {0, 0};
        Bounds r = divide(s, c);
        if (maybe_empty) {
            r.lo = std::min(r.lo, 0.0);
            r.hi = std::max(r.hi, 0.0);
        }
        return r;
    }
    }
    return {0, 0};
}

inline double sg_value(const std::vector<Member>& ms, AggFunc f) {
    Monoid mo = monoid_of(f);
    double acc = monoid_neutral(mo), sum = 0, count = 0;
    for (auto& m : ms) {
        if (m.k->sg == 0) continue;
        acc = monoid_add(mo, acc, monoid_scale(mo, m.k->sg, m.v->sg.real()));
        sum += double(m.k->sg) * m.v->sg.real();
        count += double(m.k->sg);
    }
    switch (f) {
    case AggFunc::Count: return count;
    case AggFunc::Avg: return count == 0 ? 0.0 : sum / count;
    default: return acc;
    }
}

}  // namespace agg_detail

// Grouping aggregation. Output groups follow the selected-guess group keys; a row
// whose group-by values are uncertain may add a possible-only spill row per group.
inline AuRelation aggregate(const AuRelation& r, const std::vector<std::string>& group_by, AggFunc f,
                            const std::string& attr, const std::string& as) {
    using namespace agg_detail;
    const Schema& s = r.schema();
    std::vector<std::size_t> gi;
    std::vector<Attribute> attrs;
    for (auto& g : group_by) {
        gi.push_back(s.index_of(g));
        attrs.push_back(s.attrs[gi.back()]);
    }
    attrs.push_back({as, Kind::Real});
    int ai = -1;
    if (!(f == AggFunc::Count && attr.empty())) {
        ai = int(s.index_of(attr));
        if (s.attrs[std::size_t(ai)].kind != Kind::Real) throw TypeError("aggregate attribute must be real");
    }
    AuRelation out{Schema(attrs)};

    struct Row {
        const RangeTuple* t;
        const MultTriple* m;
        RangeValue v;
        bool gcertain;
    };
    std::vector<Row> rows;
    const RangeValue one(1.0);
    for (auto& [t, m] : r.rows()) {
        bool gc = true;
        for (auto i : gi) gc = gc && t[i].certain();
        rows.push_back({&t, &m, ai < 0 ? one : t[std::size_t(ai)], gc});
    }
    auto members = [&](const std::vector<std::size_t>& idx, auto is_certain, bool count) {
        std::vector<Member> ms;
        for (auto j : idx) ms.push_back({rows[j].m, count ? &one : &rows[j].v, is_certain(j)});
        return ms;
    };

    if (group_by.empty()) {
        std::vector<std::size_t> all;
        for (std::size_t j = 0; j < rows.size(); ++j) all.push_back(j);
        auto cert = [&](std::size_t j) { return rows[j].m->lb > 0; };
        auto ms = members(all, cert, false), ones = members(all, cert, true);
        Bounds b = scenario(ms, ones, f, false);
        out.add({RangeValue(b.lo, sg_value(ms, f), b.hi)}, MultTriple::one());
        return out;
    }

    std::map<Tuple, std::vector<std::size_t>, TupleLess> groups;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        Tuple k;
        for (auto i : gi) k.push_back((*rows[j].t)[i].sg);
        groups[k].push_back(j);
    }

    for (auto& [key, assigned] : groups) {
        std::vector<std::size_t> cert_assigned, unc_assigned;
        for (auto j : assigned) (rows[j].gcertain ? cert_assigned : unc_assigned).push_back(j);

        RangeTuple g;
        for (std::size_t a = 0; a < gi.size(); ++a) {
            Scalar lo = (*rows[assigned[0]].t)[gi[a]].lb, hi = (*rows[assigned[0]].t)[gi[a]].ub;
            for (auto j : assigned) {
                lo = smin(lo, (*rows[j].t)[gi[a]].lb);
                hi = smax(hi, (*rows[j].t)[gi[a]].ub);
            }
            g.emplace_back(lo, key[a], hi);
        }

        std::vector<Bounds> parts;
        if (!cert_assigned.empty()) {
            std::vector<std::size_t> sa;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                bool in = true;
                for (std::size_t a = 0; a < gi.size() && in; ++a) in = value_bounds((*rows[j].t)[gi[a]], key[a]);
                if (in) sa.push_back(j);
            }
            auto cert = [&](std::size_t j) { return rows[j].gcertain && rows[j].m->lb > 0; };
            parts.push_back(scenario(members(sa, cert, false), members(sa, cert, true), f, true));
        }
        RangeTuple hull;
        if (!unc_assigned.empty()) {
            for (std::size_t a = 0; a < gi.size(); ++a) {
                Scalar lo = (*rows[unc_assigned[0]].t)[gi[a]].lb, hi = (*rows[unc_assigned[0]].t)[gi[a]].ub;
                for (auto j : unc_assigned) {
                    lo = smin(lo, (*rows[j].t)[gi[a]].lb);
                    hi = smax(hi, (*rows[j].t)[gi[a]].ub);
                }
                hull.emplace_back(lo, key[a], hi);
            }
            std::vector<std::size_t> sb;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (rows[j].gcertain) continue;
                bool in = true;
                for (std::size_t a = 0; a < gi.size() && in; ++a) in = overlaps((*rows[j].t)[gi[a]], hull[a]);
                if (in) sb.push_back(j);
            }
            auto none = [](std::size_t) { return false; };
            parts.push_back(scenario(members(sb, none, false), members(sb, none, true), f, true));
        }

        std::uint64_t lb = 0, sg = 0, ub = cert_assigned.empty() ? 0 : 1, unc_ub = 0;
        for (auto j : cert_assigned) lb += rows[j].m->lb;
        for (auto j : assigned) sg += rows[j].m->sg;
        for (auto j : unc_assigned) unc_ub += rows[j].m->ub;
        ub += unc_ub;
        MultTriple mult{lb > 0 ? 1u : 0u, sg > 0 ? 1u : 0u, ub};

        auto all_true = [](std::size_t) { return true; };
        double sgv = sg_value(members(assigned, all_true, false), f);

        Bounds main = parts[0];
        bool spill = parts.size() == 2 && (parts[1].lo < main.lo || parts[1].hi > main.hi);
        if (mult.sg == 0) sgv = std::clamp(sgv, main.lo, main.hi);
        g.emplace_back(main.lo, sgv, main.hi);
        out.add(g, mult);
        if (spill) {
            const Bounds& b = parts[1];
            hull.emplace_back(b.lo, std::clamp(sgv, b.lo, b.hi), b.hi);
            out.add(hull, MultTriple{0, 0, unc_ub});
        }
    }
    return out;
}

}  // namespace audb
