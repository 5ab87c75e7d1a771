#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "expr.hpp"
#include "values.hpp"

namespace audb {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Attribute {
    std::string name;
    Kind kind = Kind::Real;
    friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Schema {
    std::vector<Attribute> attrs;

    Schema() = default;
    Schema(std::vector<Attribute> a) : attrs(std::move(a)) {
        for (std::size_t i = 0; i < attrs.size(); ++i)
            for (std::size_t j = i + 1; j < attrs.size(); ++j)
                if (attrs[i].name == attrs[j].name) throw SchemaError("duplicate attribute: " + attrs[i].name);
    }

    std::size_t size() const { return attrs.size(); }
    int find(const std::string& n) const {
        for (std::size_t i = 0; i < attrs.size(); ++i)
            if (attrs[i].name == n) return int(i);
        return -1;
    }
    std::size_t index_of(const std::string& n) const {
        int i = find(n);
        if (i < 0) throw SchemaError("unknown attribute: " + n);
        return std::size_t(i);
    }
    bool has(const std::string& n) const { return find(n) >= 0; }
    Schema with(Attribute a) const {
        auto v = attrs;
        v.push_back(std::move(a));
        return Schema(std::move(v));
    }
    friend bool operator==(const Schema&, const Schema&) = default;
};

using Tuple = std::vector<Scalar>;
using RangeTuple = std::vector<RangeValue>;

struct TupleLess {
    bool operator()(const Tuple& a, const Tuple& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                            [](const Scalar& x, const Scalar& y) { return key_less(x, y); });
    }
};

struct RangeTupleLess {
    bool operator()(const RangeTuple& a, const RangeTuple& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                            [](const RangeValue& x, const RangeValue& y) { return key_less(x, y); });
    }
};

inline void check_kinds(const Schema& s, std::size_t n, auto kind_at) {
    if (n != s.size()) throw SchemaError("tuple arity does not match schema");
    for (std::size_t i = 0; i < n; ++i)
        if (kind_at(i) != s.attrs[i].kind)
            throw TypeError("attribute " + s.attrs[i].name + " expects " + kind_name(s.attrs[i].kind));
}

class AuRelation {
public:
    using Rows = std::map<RangeTuple, MultTriple, RangeTupleLess>;

    AuRelation() = default;
    explicit AuRelation(Schema s) : schema_(std::move(s)) {}

    const Schema& schema() const { return schema_; }
    const Rows& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    void add(RangeTuple t, MultTriple m) {
        check_kinds(schema_, t.size(), [&](std::size_t i) { return t[i].kind(); });
        if (m.zero()) return;
        if (rows_.empty() || RangeTupleLess()(std::prev(rows_.end())->first, t)) {
            rows_.emplace_hint(rows_.end(), std::move(t), m);
            return;
        }
        auto [it, inserted] = rows_.try_emplace(std::move(t), m);
        if (!inserted) it->second += m;
    }

    MultTriple mult(const RangeTuple& t) const {
        auto it = rows_.find(t);
        return it == rows_.end() ? MultTriple{} : it->second;
    }

    friend bool operator==(const AuRelation& a, const AuRelation& b) {
        return a.schema_ == b.schema_ && a.rows_ == b.rows_;
    }

private:
    Schema schema_;
    Rows rows_;
};

class BagRelation {
public:
    using Rows = std::map<Tuple, std::uint64_t, TupleLess>;

    BagRelation() = default;
    explicit BagRelation(Schema s) : schema_(std::move(s)) {}

    const Schema& schema() const { return schema_; }
    const Rows& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    void add(Tuple t, std::uint64_t m) {
        check_kinds(schema_, t.size(), [&](std::size_t i) { return t[i].kind(); });
        if (m == 0) return;
        rows_[std::move(t)] += m;
    }

    std::uint64_t mult(const Tuple& t) const {
        auto it = rows_.find(t);
        return it == rows_.end() ? 0 : it->second;
    }

    friend bool operator==(const BagRelation& a, const BagRelation& b) {
        return a.schema_ == b.schema_ && a.rows_ == b.rows_;
    }

private:
    Schema schema_;
    Rows rows_;
};

inline std::ostream& operator<<(std::ostream& os, const AuRelation& r) {
    os << '[';
    for (auto& a : r.schema().attrs) os << ' ' << a.name;
    os << " ]";
    for (auto& [t, m] : r.rows()) {
        os << "\n  ";
        for (auto& v : t) os << v << ' ';
        os << m;
    }
    return os;
}

inline std::ostream& operator<<(std::ostream& os, const BagRelation& r) {
    os << '[';
    for (auto& a : r.schema().attrs) os << ' ' << a.name;
    os << " ]";
    for (auto& [t, m] : r.rows()) {
        os << "\n  ";
        for (auto& v : t) os << v << ' ';
        os << 'x' << m;
    }
    return os;
}

inline RangeEnv tuple_env(const Schema& s, const RangeTuple& t) {
    return [&s, &t](const std::string& n) -> const RangeValue& {
        int i = s.find(n);
        if (i < 0) throw UnboundVariable("unbound variable: " + n);
        return t[std::size_t(i)];
    };
}

inline DetEnv tuple_env(const Schema& s, const Tuple& t) {
    return [&s, &t](const std::string& n) -> const Scalar& {
        int i = s.find(n);
        if (i < 0) throw UnboundVariable("unbound variable: " + n);
        return t[std::size_t(i)];
    };
}

// Static kind of an expression; rejects ill-typed expressions.
inline Kind expr_kind(const Expr& e, const Schema& s) {
    auto want = [&](const Expr& a, Kind k) {
        if (expr_kind(a, s) != k) throw TypeError("expected " + std::string(kind_name(k)) + " in " + to_string(e));
    };
    switch (e->op) {
    case Op::Var: return s.attrs[s.index_of(e->name)].kind;
    case Op::Const: return e->value.kind();
    case Op::Add:
    case Op::Mul:
        want(e->args[0], Kind::Real);
        want(e->args[1], Kind::Real);
        return Kind::Real;
    case Op::Not: want(e->args[0], Kind::Bool); return Kind::Bool;
    case Op::And:
    case Op::Or:
        want(e->args[0], Kind::Bool);
        want(e->args[1], Kind::Bool);
        return Kind::Bool;
    case Op::Eq:
    case Op::Le:
        if (expr_kind(e->args[0], s) != expr_kind(e->args[1], s)) throw TypeError("comparison of different kinds in " + to_string(e));
        return Kind::Bool;
    case Op::If: {
        want(e->args[0], Kind::Bool);
        Kind k = expr_kind(e->args[1], s);
        want(e->args[2], k);
        return k;
    }
    }
    throw TypeError("bad expression");
}

struct Target {
    Expr expr;
    std::string as;
};

inline Schema project_schema(const Schema& in, const std::vector<Target>& targets) {
    std::vector<Attribute> a;
    for (auto& t : targets) a.push_back({t.as, expr_kind(t.expr, in)});
    return Schema(a);
}

inline bool tuple_bounded(const RangeTuple& r, const Tuple& t) {
    if (r.size() != t.size()) return false;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].kind() != t[i].kind()) return false;
        if (!value_bounds(r[i], t[i])) return false;
    }
    return true;
}

inline Tuple sg_tuple(const RangeTuple& r) {
    Tuple t;
    t.reserve(r.size());
    for (auto& v : r) t.push_back(v.sg);
    return t;
}

inline BagRelation sg_world(const AuRelation& r) {
    BagRelation w(r.schema());
    for (auto& [t, m] : r.rows()) w.add(sg_tuple(t), m.sg);
    return w;
}

// Dinic max flow on int64 capacities.
class MaxFlow {
public:
    explicit MaxFlow(std::size_t n) : g_(n), level_(n), it_(n) {}

    std::size_t add_edge(std::size_t u, std::size_t v, std::int64_t cap) {
        g_[u].push_back({v, g_[v].size(), cap});
        g_[v].push_back({u, g_[u].size() - 1, 0});
        return g_[u].size() - 1;
    }

    std::int64_t run(std::size_t s, std::size_t t) {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) flow += f;
        }
        return flow;
    }

private:
    struct Edge {
        std::size_t to, rev;
        std::int64_t cap;
    };
    std::vector<std::vector<Edge>> g_;
    std::vector<int> level_;
    std::vector<std::size_t> it_;

    bool bfs(std::size_t s, std::size_t t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<std::size_t> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto& e : g_[u])
                if (e.cap > 0 && level_[e.to] < 0) {
                    level_[e.to] = level_[u] + 1;
                    q.push(e.to);
                }
        }
        return level_[t] >= 0;
    }

    std::int64_t dfs(std::size_t u, std::size_t t, std::int64_t f) {
        if (u == t) return f;
        for (auto& i = it_[u]; i < g_[u].size(); ++i) {
            Edge& e = g_[u][i];
            if (e.cap > 0 && level_[e.to] == level_[u] + 1) {
                std::int64_t d = dfs(e.to, t, std::min(f, e.cap));
                if (d > 0) {
                    e.cap -= d;
                    g_[e.to][e.rev].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }
};

// Flow with lower bounds: every world tuple copy is assigned to a bounding row,
// and each row receives between lb and ub copies.
inline bool bounds_world(const AuRelation& r, const BagRelation& w) {
    if (!(r.schema() == w.schema())) return false;
    std::vector<const RangeTuple*> rt;
    std::vector<MultTriple> rm;
    for (auto& [t, m] : r.rows()) {
        rt.push_back(&t);
        rm.push_back(m);
    }
    std::vector<const Tuple*> wt;
    std::vector<std::uint64_t> wm;
    for (auto& [t, m] : w.rows()) {
        wt.push_back(&t);
        wm.push_back(m);
    }
    const std::size_t nw = wt.size(), nr = rt.size();
    const std::size_t S = 0, T = 1, SS = 2, TT = 3, W0 = 4, R0 = 4 + nw;
    MaxFlow f(R0 + nr);
    std::vector<std::int64_t> excess(R0 + nr, 0);
    auto lower_edge = [&](std::size_t u, std::size_t v, std::int64_t lo, std::int64_t hi) {
        if (hi > lo) f.add_edge(u, v, hi - lo);
        excess[v] += lo;
        excess[u] -= lo;
    };
    for (std::size_t i = 0; i < nw; ++i) {
        lower_edge(S, W0 + i, std::int64_t(wm[i]), std::int64_t(wm[i]));
        bool any = false;
        for (std::size_t j = 0; j < nr; ++j)
            if (tuple_bounded(*rt[j], *wt[i])) {
                f.add_edge(W0 + i, R0 + j, std::int64_t(wm[i]));
                any = true;
            }
        if (!any) return false;
    }
    for (std::size_t j = 0; j < nr; ++j) lower_edge(R0 + j, T, std::int64_t(rm[j].lb), std::int64_t(rm[j].ub));
    f.add_edge(T, S, std::numeric_limits<std::int64_t>::max() / 4);
    std::int64_t need = 0;
    for (std::size_t v = 0; v < excess.size(); ++v) {
        if (excess[v] > 0) {
            f.add_edge(SS, v, excess[v]);
            need += excess[v];
        } else if (excess[v] < 0) {
            f.add_edge(v, TT, -excess[v]);
        }
    }
    return f.run(SS, TT) == need;
}

inline bool bounds_incomplete(const AuRelation& r, const std::vector<BagRelation>& worlds) {
    for (auto& w : worlds)
        if (!bounds_world(r, w)) return false;
    BagRelation sg = sg_world(r);
    for (auto& w : worlds)
        if (w == sg) return true;
    return false;
}

}  // namespace audb
