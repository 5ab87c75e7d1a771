#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "relation.hpp"

namespace audb {

struct SortKey {
    std::string attr;
    bool desc = false;
};

namespace det {

inline BagRelation select(const BagRelation& w, const Expr& pred) {
    BagRelation out(w.schema());
    for (auto& [t, m] : w.rows())
        if (eval_det(pred, tuple_env(w.schema(), t)).boolean()) out.add(t, m);
    return out;
}

inline BagRelation project(const BagRelation& w, const std::vector<Target>& targets) {
    BagRelation out(project_schema(w.schema(), targets));
    for (auto& [t, m] : w.rows()) {
        Tuple o;
        for (auto& tg : targets) o.push_back(eval_det(tg.expr, tuple_env(w.schema(), t)));
        out.add(std::move(o), m);
    }
    return out;
}

inline Schema concat(const Schema& a, const Schema& b) {
    auto v = a.attrs;
    for (auto& x : b.attrs) {
        if (a.has(x.name)) throw SchemaError("join inputs share attribute " + x.name);
        v.push_back(x);
    }
    return Schema(v);
}

inline BagRelation join(const BagRelation& a, const BagRelation& b, const Expr& pred) {
    Schema s = concat(a.schema(), b.schema());
    BagRelation out(s);
    for (auto& [ta, ma] : a.rows())
        for (auto& [tb, mb] : b.rows()) {
            Tuple t = ta;
            t.insert(t.end(), tb.begin(), tb.end());
            if (eval_det(pred, tuple_env(s, t)).boolean()) out.add(std::move(t), ma * mb);
        }
    return out;
}

inline BagRelation bag_union(const BagRelation& a, const BagRelation& b) {
    if (!(a.schema() == b.schema())) throw SchemaError("union inputs have different schemas");
    BagRelation out = a;
    for (auto& [t, m] : b.rows()) out.add(t, m);
    return out;
}

struct AggState {
    double sum = 0, count = 0, mn = kInf, mx = -kInf;
    void add(double v, std::uint64_t m) {
        sum += v * double(m);
        count += double(m);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    double result(AggFunc f) const {
        switch (f) {
        case AggFunc::Sum: return sum;
        case AggFunc::Count: return count;
        case AggFunc::Min: return mn;
        case AggFunc::Max: return mx;
        case AggFunc::Avg: return count == 0 ? 0.0 : sum / count;
        }
        return 0;
    }
};

inline BagRelation aggregate(const BagRelation& w, const std::vector<std::string>& group_by, AggFunc f,
                             const std::string& attr, const std::string& as) {
    std::vector<std::size_t> gi;
    std::vector<Attribute> attrs;
    for (auto& g : group_by) {
        gi.push_back(w.schema().index_of(g));
        attrs.push_back(w.schema().attrs[gi.back()]);
    }
    attrs.push_back({as, Kind::Real});
    int ai = f == AggFunc::Count && attr.empty() ? -1 : int(w.schema().index_of(attr));
    std::map<Tuple, AggState, TupleLess> groups;
    if (group_by.empty()) groups[Tuple{}];
    for (auto& [t, m] : w.rows()) {
        Tuple k;
        for (auto i : gi) k.push_back(t[i]);
        groups[k].add(ai < 0 ? 1.0 : t[std::size_t(ai)].real(), m);
    }
    BagRelation out{Schema(attrs)};
    for (auto& [k, st] : groups) {
        Tuple o = k;
        o.push_back(st.result(f));
        out.add(std::move(o), 1);
    }
    return out;
}

// Full tie-break order: the given keys, then the remaining attributes ascending.
inline std::vector<std::pair<std::size_t, bool>> full_order(const Schema& s, const std::vector<SortKey>& keys) {
    std::vector<std::pair<std::size_t, bool>> o;
    std::vector<bool> used(s.size(), false);
    for (auto& k : keys) {
        auto i = s.index_of(k.attr);
        if (used[i]) continue;
        used[i] = true;
        o.push_back({i, k.desc});
    }
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!used[i]) o.push_back({i, false});
    return o;
}

inline int compare_tuples(const Tuple& a, const Tuple& b, const std::vector<std::pair<std::size_t, bool>>& order) {
    for (auto [i, desc] : order) {
        int c = compare(a[i], b[i]);
        if (c != 0) return desc ? -c : c;
    }
    return 0;
}

// Duplicates expanded and sorted.
inline std::vector<Tuple> sorted_copies(const BagRelation& w, const std::vector<SortKey>& keys) {
    auto order = full_order(w.schema(), keys);
    std::vector<Tuple> v;
    for (auto& [t, m] : w.rows())
        for (std::uint64_t i = 0; i < m; ++i) v.push_back(t);
    std::stable_sort(v.begin(), v.end(),
                     [&](const Tuple& a, const Tuple& b) { return compare_tuples(a, b, order) < 0; });
    return v;
}

inline BagRelation sort(const BagRelation& w, const std::vector<SortKey>& keys, const std::string& as) {
    BagRelation out(w.schema().with({as, Kind::Real}));
    auto v = sorted_copies(w, keys);
    for (std::size_t p = 0; p < v.size(); ++p) {
        Tuple t = v[p];
        t.push_back(double(p));
        out.add(std::move(t), 1);
    }
    return out;
}

inline BagRelation topk(const BagRelation& w, const std::vector<SortKey>& keys, const std::string& as,
                        std::uint64_t k) {
    BagRelation s = sort(w, keys, as);
    BagRelation out(s.schema());
    for (auto& [t, m] : s.rows())
        if (t.back().real() < double(k)) out.add(t, m);
    return out;
}

inline BagRelation window(const BagRelation& w, AggFunc f, const std::string& attr, const std::string& as,
                          const std::vector<std::string>& partition_by, const std::vector<SortKey>& keys,
                          long l, long u) {
    if (l > u) throw std::invalid_argument("window frame has l > u");
    if (f == AggFunc::Avg && (l > 0 || u < 0)) throw std::invalid_argument("avg window frame must contain the row");
    std::vector<std::size_t> gi;
    for (auto& g : partition_by) gi.push_back(w.schema().index_of(g));
    int ai = f == AggFunc::Count && attr.empty() ? -1 : int(w.schema().index_of(attr));
    auto v = sorted_copies(w, keys);
    std::map<Tuple, std::vector<std::size_t>, TupleLess> parts;
    for (std::size_t p = 0; p < v.size(); ++p) {
        Tuple k;
        for (auto i : gi) k.push_back(v[p][i]);
        parts[k].push_back(p);
    }
    BagRelation out(w.schema().with({as, Kind::Real}));
    for (auto& [k, idx] : parts) {
        long n = long(idx.size());
        for (long p = 0; p < n; ++p) {
            AggState st;
            for (long q = std::max(0L, p + l); q <= std::min(n - 1, p + u); ++q) {
                const Tuple& t = v[idx[std::size_t(q)]];
                st.add(ai < 0 ? 1.0 : t[std::size_t(ai)].real(), 1);
            }
            Tuple t = v[idx[std::size_t(p)]];
            t.push_back(st.result(f));
            out.add(std::move(t), 1);
        }
    }
    return out;
}

}  // namespace det
}  // namespace audb
