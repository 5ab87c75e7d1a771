#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "connected_heap.hpp"
#include "window.hpp"

namespace audb {

namespace native_detail {

enum class End { Low, Sg, High };

inline const Scalar& end_of(const RangeValue& v, End e, bool desc) {
    switch (e) {
    case End::Low: return low_end(v, desc);
    case End::Sg: return v.sg;
    default: return high_end(v, desc);
    }
}

inline int cmp_ends(const RangeTuple& a, End ea, const RangeTuple& b, End eb, const SortOrder& order) {
    for (auto [i, d] : order) {
        int c = ocmp(end_of(a[i], ea, d), end_of(b[i], eb, d), d);
        if (c != 0) return c;
    }
    return 0;
}

}  // namespace native_detail

struct SortInput {
    const RangeTuple* t;
    MultTriple m;
};

namespace native_detail {

// Sort keys of every row, copied into one contiguous array when all order
// attributes are real. Descending attributes are stored negated.
class KeyTable {
public:
    KeyTable(const std::vector<SortInput>& rows, const SortOrder& order) : rows_(&rows), order_(&order), k_(order.size()) {
        numeric_ = true;
        for (auto& r : rows)
            for (auto [i, d] : order)
                numeric_ = numeric_ && (*r.t)[i].lb.kind() == Kind::Real;
        if (!numeric_) return;
        keys_.resize(rows.size() * 3 * k_);
        for (auto& l : lead_) l.resize(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t j = 0; j < k_; ++j) {
                auto [i, d] = order[j];
                const RangeValue& v = (*rows[r].t)[i];
                double lo = v.lb.real(), sg = v.sg.real(), hi = v.ub.real();
                if (d) std::tie(lo, sg, hi) = std::tuple(-hi, -sg, -lo);
                keys_[at(r, End::Low) + j] = lo;
                keys_[at(r, End::Sg) + j] = sg;
                keys_[at(r, End::High) + j] = hi;
                if (j == 0) {
                    lead_[0][r] = lo;
                    lead_[1][r] = sg;
                    lead_[2][r] = hi;
                }
            }
    }

    int cmp(std::size_t a, End ea, std::size_t b, End eb) const {
        if (!numeric_) return cmp_ends(*(*rows_)[a].t, ea, *(*rows_)[b].t, eb, *order_);
        if (k_ == 0) return 0;
        const double u = lead_[std::size_t(ea)][a], v = lead_[std::size_t(eb)][b];
        if (u < v) return -1;
        if (u > v) return 1;
        const double *x = &keys_[at(a, ea)], *y = &keys_[at(b, eb)];
        for (std::size_t j = 1; j < k_; ++j) {
            if (x[j] < y[j]) return -1;
            if (x[j] > y[j]) return 1;
        }
        return 0;
    }

    // First key component of end e, or 0 when keys are not numeric.
    double lead(End e, std::size_t r) const { return numeric_ && k_ ? lead_[std::size_t(e)][r] : 0.0; }

    // Same order as sg_precedes.
    bool sg_less(std::size_t a, std::size_t b) const {
        for (End e : {End::Sg, End::High, End::Low}) {
            int c = cmp(a, e, b, e);
            if (c != 0) return c < 0;
        }
        return false;
    }

private:
    const std::vector<SortInput>* rows_;
    const SortOrder* order_;
    std::size_t k_;
    bool numeric_;
    std::vector<double> keys_;
    std::array<std::vector<double>, 3> lead_;

    std::size_t at(std::size_t r, End e) const { return (r * 3 + std::size_t(e)) * k_; }
};

}  // namespace native_detail

// One pass over rows given in nondecreasing order of their low ends. Certain
// positions come from a heap of rows keyed by high ends; possible and
// selected-guess positions from prefix sums over sorted keys. With k set, rows
// whose certain position reaches k are not processed and get no position.
inline std::vector<std::optional<RangeValue>> onepass_sort(const std::vector<SortInput>& rows, const SortOrder& order,
                                                           std::optional<std::uint64_t> k = std::nullopt) {
    using namespace native_detail;
    const std::size_t n = rows.size();
    const KeyTable keys(rows, order);
    for (std::size_t i = 1; i < n; ++i)
        if (keys.cmp(i - 1, End::Low, i, End::Low) > 0)
            throw std::invalid_argument("onepass_sort input is not sorted by low ends");

    std::vector<std::uint64_t> lb(n, 0);
    std::size_t processed = 0;
    {
        auto later = [&](std::size_t a, std::size_t b) { return keys.cmp(a, End::High, b, End::High) > 0; };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> todo(later);
        std::uint64_t rank = 0;
        for (; processed < n; ++processed) {
            while (!todo.empty() && keys.cmp(todo.top(), End::High, processed, End::Low) < 0) {
                rank += rows[todo.top()].m.lb;
                todo.pop();
            }
            if (k && rank >= *k) break;
            lb[processed] = rank;
            todo.push(processed);
        }
    }

    // Prefix sums of ub multiplicities over rows in low-end order.
    std::vector<std::uint64_t> ub_prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ub_prefix[i + 1] = ub_prefix[i] + rows[i].m.ub;

    std::vector<std::pair<double, std::size_t>> by_sg(n);
    for (std::size_t i = 0; i < n; ++i) by_sg[i] = {keys.lead(End::Sg, i), i};
    std::sort(by_sg.begin(), by_sg.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return keys.sg_less(a.second, b.second);
    });
    std::vector<std::uint64_t> sg(n, 0);
    for (std::uint64_t acc = 0; auto [_, i] : by_sg) {
        sg[i] = acc;
        acc += rows[i].m.sg;
    }

    std::vector<std::optional<RangeValue>> out(n);
    for (std::size_t i = 0; i < processed; ++i) {
        // rows [0, hi) have low ends strictly before the high end of row i
        auto before = [&](std::size_t j) { return keys.cmp(j, End::Low, i, End::High) < 0; };
        std::size_t lo, hi;
        if (before(i)) {
            lo = i + 1;
            hi = lo;
            for (std::size_t step = 1; hi < n && before(hi); step *= 2) {
                lo = hi + 1;
                hi = std::min(n, hi + step);
            }
        } else {
            hi = i;
            lo = hi;
            for (std::size_t step = 1; lo > 0 && !before(lo - 1); step *= 2) {
                hi = lo - 1;
                lo = lo > step ? lo - step : 0;
            }
        }
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (before(mid)) lo = mid + 1;
            else hi = mid;
        }
        std::uint64_t ub = ub_prefix[lo];
        if (keys.cmp(i, End::Low, i, End::High) < 0) ub -= rows[i].m.ub;
        out[i] = RangeValue(double(lb[i]), double(sg[i]), double(ub));
    }
    return out;
}

inline std::vector<SortInput> sorted_by_low(const AuRelation& r, const SortOrder& order) {
    using namespace native_detail;
    std::vector<SortInput> rows;
    rows.reserve(r.size());
    for (auto& [t, m] : r.rows()) rows.push_back({&t, m});
    const KeyTable keys(rows, order);
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys.cmp(a, End::Low, b, End::Low) < 0; });
    std::vector<SortInput> out;
    out.reserve(rows.size());
    for (auto i : idx) out.push_back(rows[i]);
    return out;
}

inline AuRelation native_sort(const AuRelation& r, const std::vector<SortKey>& keys, const std::string& as,
                              std::optional<std::uint64_t> k = std::nullopt) {
    SortOrder order = sort_order(r.schema(), keys);
    AuRelation out(sort_schema(r.schema(), as));
    auto rows = sorted_by_low(r, order);
    auto pos = onepass_sort(rows, order, k);
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (pos[i]) emit_copies(out, *rows[i].t, rows[i].m, *pos[i]);
    return out;
}

inline AuRelation native_topk(const AuRelation& r, const std::vector<SortKey>& keys, const std::string& as,
                              std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("topk requires k >= 1");
    return topk_filter(native_sort(r, keys, as, k), k);
}

// Independent heaps; removing a record popped from one heap searches the others linearly.
template <class T, std::size_t H, class Less>
class LinearDeletionHeaps {
public:
    using Id = std::size_t;

    explicit LinearDeletionHeaps(Less less = Less()) : less_(std::move(less)) {}

    std::size_t size() const { return heaps_[0].size(); }
    bool empty() const { return heaps_[0].empty(); }

    Id insert(T value) {
        Id id = values_.size();
        values_.push_back(std::move(value));
        for (std::size_t h = 0; h < H; ++h) {
            heaps_[h].push_back(id);
            std::push_heap(heaps_[h].begin(), heaps_[h].end(), cmp(h));
        }
        return id;
    }

    Id top_id(std::size_t h) const { return heaps_[h].front(); }
    const T& top(std::size_t h) const { return values_[top_id(h)]; }
    const T& get(Id id) const { return values_[id]; }

    T pop(std::size_t h) {
        Id id = top_id(h);
        std::pop_heap(heaps_[h].begin(), heaps_[h].end(), cmp(h));
        heaps_[h].pop_back();
        for (std::size_t o = 0; o < H; ++o)
            if (o != h) remove_linear(o, id);
        return values_[id];
    }

    void erase(Id id) {
        for (std::size_t o = 0; o < H; ++o) remove_linear(o, id);
    }

    template <class F>
    void walk(std::size_t h, F f) const {
        const auto& hp = heaps_[h];
        if (hp.empty()) return;
        auto later = [&](std::size_t a, std::size_t b) { return less_(h, values_[hp[b]], values_[hp[a]]); };
        auto& frontier = scratch_;
        frontier.assign(1, 0);
        while (!frontier.empty()) {
            std::pop_heap(frontier.begin(), frontier.end(), later);
            std::size_t i = frontier.back();
            frontier.pop_back();
            if (!f(hp[i], values_[hp[i]])) return;
            for (std::size_t c = 2 * i + 1; c <= 2 * i + 2 && c < hp.size(); ++c) {
                frontier.push_back(c);
                std::push_heap(frontier.begin(), frontier.end(), later);
            }
        }
    }

private:
    Less less_;
    std::vector<T> values_;
    std::array<std::vector<Id>, H> heaps_;
    mutable std::vector<std::size_t> scratch_;

    auto cmp(std::size_t h) const {
        return [this, h](Id a, Id b) { return less_(h, values_[b], values_[a]); };
    }

    void remove_linear(std::size_t h, Id id) {
        auto& hp = heaps_[h];
        auto it = std::find(hp.begin(), hp.end(), id);
        if (it == hp.end()) return;
        std::size_t i = std::size_t(it - hp.begin());
        hp[i] = hp.back();
        hp.pop_back();
        if (i >= hp.size()) return;
        auto c = cmp(h);
        // restore the heap around slot i
        while (i > 0 && c(hp[(i - 1) / 2], hp[i])) {
            std::swap(hp[i], hp[(i - 1) / 2]);
            i = (i - 1) / 2;
        }
        for (;;) {
            std::size_t l = 2 * i + 1, r = l + 1, m = i;
            if (l < hp.size() && c(hp[m], hp[l])) m = l;
            if (r < hp.size() && c(hp[m], hp[r])) m = r;
            if (m == i) break;
            std::swap(hp[i], hp[m]);
            i = m;
        }
    }
};

namespace native_detail {

struct Item {
    double lb, sg, ub;
    double alb, asg, aub;
    bool cert, sg_exists;
};

struct PossLess {
    const std::vector<Item>* items;
    // 0: position upper bound, 1: value lower bound, 2: value upper bound descending
    bool operator()(std::size_t h, std::size_t a, std::size_t b) const {
        const Item &x = (*items)[a], &y = (*items)[b];
        switch (h) {
        case 0: return x.ub < y.ub || (x.ub == y.ub && a < b);
        case 1: return x.alb < y.alb || (x.alb == y.alb && a < b);
        default: return x.aub > y.aub || (x.aub == y.aub && a < b);
        }
    }
};

struct OpenLess {
    const std::vector<Item>* items;
    bool operator()(std::size_t h, std::size_t a, std::size_t b) const {
        const Item &x = (*items)[a], &y = (*items)[b];
        double kx = h == 0 ? x.ub : x.lb, ky = h == 0 ? y.ub : y.lb;
        return kx < ky || (kx == ky && a < b);
    }
};

}  // namespace native_detail

template <template <class, std::size_t, class> class Store = ConnectedHeap>
AuRelation native_window(const AuRelation& r, const WindowSpec& w) {
    using namespace native_detail;
    check_window(r.schema(), w);
    if (!w.partition_by.empty()) throw std::invalid_argument("native window does not support partitioning");

    AuRelation flat = native_sort(r, {}, kRowIdAttr);
    const Schema& fs = flat.schema();
    SortOrder order = sort_order(fs, w.order);
    auto rows = sorted_by_low(flat, order);
    auto pos = onepass_sort(rows, order);
    int ai = w.f == AggFunc::Count && w.attr.empty() ? -1 : int(fs.index_of(w.attr));

    const std::size_t n = rows.size();
    std::vector<Item> items(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RangeValue& p = *pos[i];
        RangeValue a = ai < 0 ? RangeValue(1.0) : (*rows[i].t)[std::size_t(ai)];
        items[i] = {p.lb.real(), p.sg.real(), p.ub.real(), a.lb.real(), a.sg.real(), a.ub.real(),
                    rows[i].m.lb > 0, rows[i].m.sg > 0};
    }

    const double l = double(w.l), u = double(w.u), span = u - l;
    const std::uint64_t width = std::uint64_t(w.u - w.l + 1);
    const bool self_in = w.l <= 0 && w.u >= 0;

    // Selected-guess window over rows present in the selected guess.
    std::vector<double> sg_at;
    {
        std::vector<std::pair<double, double>> v;
        for (auto& it : items)
            if (it.sg_exists) v.push_back({it.sg, it.asg});
        std::sort(v.begin(), v.end());
        for (auto& [p, a] : v) sg_at.push_back(a);
    }
    std::vector<double> sg_prefix(sg_at.size() + 1, 0);
    for (std::size_t i = 0; i < sg_at.size(); ++i) sg_prefix[i + 1] = sg_prefix[i] + sg_at[i];
    auto sg_value = [&](const Item& s) {
        long lo = std::max(0L, long(s.sg) + w.l), hi = std::min(long(sg_at.size()) - 1, long(s.sg) + w.u);
        std::vector<double> vals;
        if (lo > hi) return window_sg(w.f, vals);
        if (w.f == AggFunc::Sum) return sg_prefix[std::size_t(hi) + 1] - sg_prefix[std::size_t(lo)];
        if (w.f == AggFunc::Count) return double(hi - lo + 1);
        vals.assign(sg_at.begin() + lo, sg_at.begin() + hi + 1);
        return window_sg(w.f, vals);
    };

    std::vector<std::size_t> by_lb(n);
    std::iota(by_lb.begin(), by_lb.end(), 0);
    std::stable_sort(by_lb.begin(), by_lb.end(), [&](std::size_t a, std::size_t b) { return items[a].lb < items[b].lb; });

    Store<std::size_t, 2, OpenLess> openw(OpenLess{&items});
    Store<std::size_t, 3, PossLess> poss(PossLess{&items});
    std::map<double, std::set<std::pair<double, std::size_t>>> cert;
    std::vector<std::size_t> stamp(n, 0);
    std::size_t epoch = 0;
    std::vector<RangeValue> result(n);

    auto emit = [&](std::size_t si, double next_lb) {
        const Item& s = items[si];
        const double a_lb = s.lb + u, a_ub = s.ub + u;
        // Rows still to be emitted have anchors at or above these marks.
        double mark_ub = std::min(a_ub, next_lb + u), mark_lb = std::min(a_lb, next_lb + u);
        if (!openw.empty()) {
            mark_ub = std::min(mark_ub, items[openw.top(0)].ub + u);
            mark_lb = std::min(mark_lb, items[openw.top(1)].lb + u);
        }
        while (!cert.empty() && cert.begin()->first < mark_ub - span) cert.erase(cert.begin());
        while (!poss.empty() && items[poss.top(0)].ub < mark_lb - span) poss.pop(0);

        ++epoch;
        std::vector<std::size_t> members;
        for (auto it = cert.lower_bound(a_ub - span); it != cert.end() && it->first <= a_lb; ++it)
            for (auto& [ub, j] : it->second) {
                if (ub > a_lb) break;
                if (j == si) continue;
                members.push_back(j);
                stamp[j] = epoch;
            }
        if (self_in) members.push_back(si);
        stamp[si] = epoch;
        const std::uint64_t c = members.size() >= width ? 0 : width - members.size();
        auto possible = [&](std::size_t j) {
            return stamp[j] != epoch && items[j].lb <= a_ub && items[j].ub >= a_lb - span;
        };

        double lo = 0, hi = 0;
        auto sum_bounds = [&](double& slo, double& shi) {
            slo = shi = 0;
            for (auto j : members) {
                slo += items[j].alb;
                shi += items[j].aub;
            }
            std::uint64_t taken = 0;
            if (c > 0)
                poss.walk(1, [&](std::size_t, std::size_t j) {
                    if (items[j].alb >= 0) return false;
                    if (!possible(j)) return true;
                    slo += items[j].alb;
                    return ++taken < c;
                });
            taken = 0;
            if (c > 0)
                poss.walk(2, [&](std::size_t, std::size_t j) {
                    if (items[j].aub <= 0) return false;
                    if (!possible(j)) return true;
                    shi += items[j].aub;
                    return ++taken < c;
                });
        };
        auto count_bounds = [&](double& clo, double& chi) {
            clo = double(members.size());
            std::uint64_t taken = 0;
            if (c > 0)
                poss.walk(0, [&](std::size_t, std::size_t j) {
                    if (!possible(j)) return true;
                    return ++taken < c;
                });
            chi = clo + double(taken);
        };
        switch (w.f) {
        case AggFunc::Sum: sum_bounds(lo, hi); break;
        case AggFunc::Count: count_bounds(lo, hi); break;
        case AggFunc::Min: {
            lo = hi = kInf;
            for (auto j : members) {
                lo = std::min(lo, items[j].alb);
                hi = std::min(hi, items[j].aub);
            }
            if (c > 0)
                poss.walk(1, [&](std::size_t, std::size_t j) {
                    if (!possible(j)) return true;
                    lo = std::min(lo, items[j].alb);
                    return false;
                });
            break;
        }
        case AggFunc::Max: {
            lo = hi = -kInf;
            for (auto j : members) {
                lo = std::max(lo, items[j].alb);
                hi = std::max(hi, items[j].aub);
            }
            if (c > 0)
                poss.walk(2, [&](std::size_t, std::size_t j) {
                    if (!possible(j)) return true;
                    hi = std::max(hi, items[j].aub);
                    return false;
                });
            break;
        }
        case AggFunc::Avg: {
            double slo, shi, clo, chi;
            sum_bounds(slo, shi);
            count_bounds(clo, chi);
            clo = std::max(1.0, clo);
            double q[4] = {slo / clo, slo / chi, shi / clo, shi / chi};
            lo = *std::min_element(q, q + 4);
            hi = *std::max_element(q, q + 4);
            break;
        }
        }
        result[si] = finish_bounds({lo, 0, hi}, sg_value(s), s.sg_exists);
    };

    for (std::size_t ti : by_lb) {
        const Item& t = items[ti];
        while (!openw.empty() && items[openw.top(0)].ub + u < t.lb) emit(openw.pop(0), t.lb);
        if (t.cert) cert[t.lb].insert({t.ub, ti});
        poss.insert(ti);
        openw.insert(ti);
    }
    while (!openw.empty()) emit(openw.pop(0), kInf);

    AuRelation out(r.schema().with({w.as, Kind::Real}));
    for (std::size_t i = 0; i < n; ++i) {
        RangeTuple o(rows[i].t->begin(), rows[i].t->end() - 1);
        o.push_back(result[i]);
        out.add(std::move(o), rows[i].m);
    }
    return out;
}

}  // namespace audb
