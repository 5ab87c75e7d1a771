#pragma once

#include <string>
#include <vector>

#include "algebra.hpp"
#include "det.hpp"
#include "relation.hpp"

namespace audb {

// Attribute index and descending flag, in comparison order.
using SortOrder = std::vector<std::pair<std::size_t, bool>>;

inline SortOrder sort_order(const Schema& s, const std::vector<SortKey>& keys) { return det::full_order(s, keys); }

inline int ocmp(const Scalar& a, const Scalar& b, bool desc) {
    int c = compare(a, b);
    return desc ? -c : c;
}

// Ends of a range in the oriented order of one sort attribute.
inline const Scalar& low_end(const RangeValue& v, bool desc) { return desc ? v.ub : v.lb; }
inline const Scalar& high_end(const RangeValue& v, bool desc) { return desc ? v.lb : v.ub; }

// Lexicographic comparison lifted to range tuples. s certainly precedes t iff its
// high ends precede the low ends of t, and possibly precedes iff its low ends
// precede the high ends of t.
inline RangeBool range_less(const RangeTuple& s, const RangeTuple& t, const SortOrder& order) {
    RangeBool res;
    bool lb_done = false, sg_done = false, ub_done = false;
    for (auto [i, d] : order) {
        const RangeValue &a = s[i], &b = t[i];
        if (!lb_done) {
            int c = ocmp(high_end(a, d), low_end(b, d), d);
            res.lb = c < 0;
            lb_done = c != 0;
        }
        if (!sg_done) {
            int c = ocmp(a.sg, b.sg, d);
            res.sg = c < 0;
            sg_done = c != 0;
        }
        if (!ub_done) {
            int c = ocmp(low_end(a, d), high_end(b, d), d);
            res.ub = c < 0;
            ub_done = c != 0;
        }
        if (lb_done && sg_done && ub_done) break;
    }
    return res;
}

// Order used to place rows in the selected-guess world: the selected-guess values,
// with rows sharing them ordered by their high ends and then their low ends.
inline bool sg_precedes(const RangeTuple& s, const RangeTuple& t, const SortOrder& order) {
    for (auto [i, d] : order) {
        int c = ocmp(s[i].sg, t[i].sg, d);
        if (c != 0) return c < 0;
    }
    for (auto [i, d] : order) {
        int c = ocmp(high_end(s[i], d), high_end(t[i], d), d);
        if (c != 0) return c < 0;
    }
    for (auto [i, d] : order) {
        int c = ocmp(low_end(s[i], d), low_end(t[i], d), d);
        if (c != 0) return c < 0;
    }
    return false;
}

struct Precedence {
    bool lb, sg, ub;
};

inline Precedence precedes(const RangeTuple& s, const RangeTuple& t, const SortOrder& order) {
    RangeBool b = range_less(s, t, order);
    return {b.lb, sg_precedes(s, t, order), b.ub};
}

// Position bounds of the first copy of row `self` among `rows`.
inline RangeValue pos_bounds(const AuRelation& r, const SortOrder& order, const RangeTuple& self) {
    std::uint64_t lb = 0, sg = 0, ub = 0;
    for (auto& [t, m] : r.rows()) {
        if (&t == &self || t == self) continue;
        Precedence p = precedes(t, self, order);
        if (p.lb) lb += m.lb;
        if (p.sg) sg += m.sg;
        if (p.ub) ub += m.ub;
    }
    return RangeValue(double(lb), double(sg), double(ub));
}

// Multiplicity of copy i of a row with multiplicity m.
inline MultTriple copy_mult(const MultTriple& m, std::uint64_t i) {
    if (i < m.lb) return {1, 1, 1};
    if (i < m.sg) return {0, 1, 1};
    return {0, 0, 1};
}

inline RangeValue shift(const RangeValue& p, double i) {
    return RangeValue(p.lb.real() + i, p.sg.real() + i, p.ub.real() + i);
}

inline Schema sort_schema(const Schema& s, const std::string& as) {
    if (s.has(as)) throw SchemaError("sort position attribute already exists: " + as);
    return s.with({as, Kind::Real});
}

inline void emit_copies(AuRelation& out, const RangeTuple& t, const MultTriple& m, const RangeValue& pos) {
    for (std::uint64_t i = 0; i < m.ub; ++i) {
        RangeTuple o = t;
        o.push_back(shift(pos, double(i)));
        out.add(std::move(o), copy_mult(m, i));
    }
}

inline AuRelation sort(const AuRelation& r, const std::vector<SortKey>& keys, const std::string& as) {
    SortOrder order = sort_order(r.schema(), keys);
    AuRelation out(sort_schema(r.schema(), as));
    for (auto& [t, m] : r.rows()) emit_copies(out, t, m, pos_bounds(r, order, t));
    return out;
}

inline AuRelation topk_filter(const AuRelation& sorted, std::uint64_t k) {
    AuRelation out(sorted.schema());
    double kk = double(k);
    for (auto& [t, m] : sorted.rows()) {
        const RangeValue& p = t.back();
        MultTriple c{std::uint64_t(p.ub.real() < kk), std::uint64_t(p.sg.real() < kk), std::uint64_t(p.lb.real() < kk)};
        out.add(t, m * c);
    }
    return out;
}

inline AuRelation topk(const AuRelation& r, const std::vector<SortKey>& keys, const std::string& as, std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("topk requires k >= 1");
    return topk_filter(sort(r, keys, as), k);
}

}  // namespace audb
