#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "ordering.hpp"

namespace audb {

struct WindowSpec {
    AggFunc f = AggFunc::Sum;
    std::string attr;
    std::string as;
    std::vector<std::string> partition_by;
    std::vector<SortKey> order;
    long l = 0, u = 0;
};

inline const char* kRowIdAttr = "__rowid";

inline void check_window(const Schema& s, const WindowSpec& w) {
    if (w.l > w.u) throw std::invalid_argument("window frame has l > u");
    if (w.f == AggFunc::Avg && (w.l > 0 || w.u < 0))
        throw std::invalid_argument("avg window frame must contain the current row");
    if (!(w.f == AggFunc::Count && w.attr.empty()) && s.attrs[s.index_of(w.attr)].kind != Kind::Real)
        throw TypeError("window aggregate attribute must be real");
    for (auto& g : w.partition_by) s.index_of(g);
    for (auto& k : w.order) s.index_of(k.attr);
    if (s.has(w.as)) throw SchemaError("window output attribute already exists: " + w.as);
    if (s.has(kRowIdAttr)) throw SchemaError(std::string("reserved attribute name: ") + kRowIdAttr);
}

// One row per possible duplicate, identified by its position under the full schema order.
inline AuRelation flatten(const AuRelation& r) {
    AuRelation s = sort(r, {}, kRowIdAttr);
    return s;
}

struct WindowBounds {
    double lo, sg, hi;
};

namespace window_detail {

inline double sum_smallest(std::vector<double> v, std::uint64_t c) {
    std::sort(v.begin(), v.end());
    double s = 0;
    for (std::uint64_t i = 0; i < c && i < v.size() && v[i] < 0; ++i) s += v[i];
    return s;
}

inline double sum_largest(std::vector<double> v, std::uint64_t c) {
    std::sort(v.begin(), v.end(), std::greater<>());
    double s = 0;
    for (std::uint64_t i = 0; i < c && i < v.size() && v[i] > 0; ++i) s += v[i];
    return s;
}

}  // namespace window_detail

// Aggregate bounds from certain members, possible members and the free slot count c.
inline WindowBounds window_bounds(AggFunc f, const std::vector<const RangeValue*>& cert,
                                  const std::vector<const RangeValue*>& poss, std::uint64_t c) {
    using namespace window_detail;
    double cl = 0, cu = 0, n = double(cert.size());
    std::vector<double> pl, pu;
    for (auto* v : cert) {
        cl += v->lb.real();
        cu += v->ub.real();
    }
    for (auto* v : poss) {
        pl.push_back(v->lb.real());
        pu.push_back(v->ub.real());
    }
    switch (f) {
    case AggFunc::Sum: return {cl + sum_smallest(pl, c), 0, cu + sum_largest(pu, c)};
    case AggFunc::Count: return {n, 0, n + double(std::min<std::uint64_t>(c, poss.size()))};
    case AggFunc::Min: {
        double lo = kInf, hi = kInf;
        for (auto* v : cert) {
            lo = std::min(lo, v->lb.real());
            hi = std::min(hi, v->ub.real());
        }
        if (c > 0)
            for (double x : pl) lo = std::min(lo, x);
        return {lo, 0, hi};
    }
    case AggFunc::Max: {
        double lo = -kInf, hi = -kInf;
        for (auto* v : cert) {
            lo = std::max(lo, v->lb.real());
            hi = std::max(hi, v->ub.real());
        }
        if (c > 0)
            for (double x : pu) hi = std::max(hi, x);
        return {lo, 0, hi};
    }
    case AggFunc::Avg: {
        WindowBounds s = window_bounds(AggFunc::Sum, cert, poss, c);
        WindowBounds k = window_bounds(AggFunc::Count, cert, poss, c);
        k.lo = std::max(1.0, k.lo);
        double q[4] = {s.lo / k.lo, s.lo / k.hi, s.hi / k.lo, s.hi / k.hi};
        WindowBounds r{q[0], 0, q[0]};
        for (double x : q) {
            r.lo = std::min(r.lo, x);
            r.hi = std::max(r.hi, x);
        }
        return r;
    }
    }
    return {0, 0, 0};
}

// Aggregate over the selected-guess window.
inline double window_sg(AggFunc f, const std::vector<double>& vals) {
    double s = 0, mn = kInf, mx = -kInf;
    for (double v : vals) {
        s += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    switch (f) {
    case AggFunc::Sum: return s;
    case AggFunc::Count: return double(vals.size());
    case AggFunc::Min: return mn;
    case AggFunc::Max: return mx;
    case AggFunc::Avg: return vals.empty() ? 0.0 : s / double(vals.size());
    }
    return 0;
}

inline RangeValue finish_bounds(WindowBounds b, double sg, bool sg_exists) {
    if (!sg_exists) sg = std::clamp(sg, b.lo, b.hi);
    return RangeValue(b.lo, sg, b.hi);
}

struct Membership {
    bool cert, poss;
};

// Position interval q against the window of an anchor at positions p.
inline Membership window_membership(const RangeValue& p, const RangeValue& q, long l, long u) {
    const double plb = p.lb.real(), pub = p.ub.real(), ql = q.lb.real(), qu = q.ub.real();
    return {ql >= pub + double(l) && qu <= plb + double(u), ql <= pub + double(u) && qu >= plb + double(l)};
}

// Reference row-based windowed aggregation over range-annotated rows.
inline AuRelation window_aggregate(const AuRelation& r, const WindowSpec& w) {
    check_window(r.schema(), w);
    AuRelation flat = flatten(r);
    const Schema& fs = flat.schema();
    SortOrder order = sort_order(fs, w.order);
    std::vector<std::size_t> gi;
    for (auto& g : w.partition_by) gi.push_back(fs.index_of(g));
    int ai = w.f == AggFunc::Count && w.attr.empty() ? -1 : int(fs.index_of(w.attr));
    const RangeValue one(1.0);

    std::vector<const RangeTuple*> rows;
    std::vector<MultTriple> mult;
    for (auto& [t, m] : flat.rows()) {
        rows.push_back(&t);
        mult.push_back(m);
    }
    const std::size_t n = rows.size();
    std::vector<Precedence> prec(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) prec[a * n + b] = precedes(*rows[a], *rows[b], order);

    auto positions = [&](const std::vector<MultTriple>& part) {
        std::vector<RangeValue> pos(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::uint64_t lb = 0, sg = 0, ub = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j || part[k].zero()) continue;
                const Precedence& p = prec[k * n + j];
                if (p.lb) lb += part[k].lb;
                if (p.sg) sg += part[k].sg;
                if (p.ub) ub += part[k].ub;
            }
            pos[j] = RangeValue(double(lb), double(sg), double(ub));
        }
        return pos;
    };
    auto partition_of = [&](std::size_t a) {
        std::vector<MultTriple> part(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == a) {
                part[j] = mult[j];
                continue;
            }
            RangeBool e{true, true, true};
            for (auto i : gi) {
                const RangeValue &x = (*rows[j])[i], &y = (*rows[a])[i];
                e.lb = e.lb && x.certain() && y.certain() && x.lb == y.lb;
                e.sg = e.sg && x.sg == y.sg;
                e.ub = e.ub && overlaps(x, y);
            }
            part[j] = mult[j] * e.mult();
        }
        return part;
    };

    std::vector<RangeValue> shared;
    if (gi.empty()) shared = positions(mult);

    const double l = double(w.l), u = double(w.u);
    const std::uint64_t width = std::uint64_t(w.u - w.l + 1);
    const bool self_in = w.l <= 0 && w.u >= 0;
    AuRelation out(r.schema().with({w.as, Kind::Real}));
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<MultTriple> part;
        std::vector<RangeValue> own;
        if (!gi.empty()) {
            part = partition_of(a);
            own = positions(part);
        }
        const std::vector<MultTriple>& pm = gi.empty() ? mult : part;
        const std::vector<RangeValue>& pos = gi.empty() ? shared : own;
        const double psg = pos[a].sg.real();

        std::vector<const RangeValue*> cert, poss;
        std::vector<double> sgvals;
        auto value = [&](std::size_t j) -> const RangeValue& { return ai < 0 ? one : (*rows[j])[std::size_t(ai)]; };
        if (self_in) {
            cert.push_back(&value(a));
            if (mult[a].sg > 0) sgvals.push_back(value(a).sg.real());
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == a || pm[j].zero()) continue;
            Membership mb = window_membership(pos[a], pos[j], w.l, w.u);
            const double qs = pos[j].sg.real();
            if (mb.cert && pm[j].lb > 0) cert.push_back(&value(j));
            else if (mb.poss) poss.push_back(&value(j));
            if (pm[j].sg > 0 && qs >= psg + l && qs <= psg + u) sgvals.push_back(value(j).sg.real());
        }
        std::uint64_t c = cert.size() >= width ? 0 : width - cert.size();
        WindowBounds b = window_bounds(w.f, cert, poss, c);
        RangeTuple o(rows[a]->begin(), rows[a]->end() - 1);
        o.push_back(finish_bounds(b, window_sg(w.f, sgvals), mult[a].sg > 0));
        out.add(std::move(o), mult[a]);
    }
    return out;
}

}  // namespace audb
