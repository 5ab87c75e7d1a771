#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace audb {

// H binary heaps over one record set. Each record keeps its index in every heap,
// so popping from one heap removes it from the others in O(log n).
// Less(h, a, b) orders heap h.
template <class T, std::size_t H, class Less>
class ConnectedHeap {
public:
    using Id = std::size_t;

    explicit ConnectedHeap(Less less = Less()) : less_(std::move(less)) {}

    std::size_t size() const { return heaps_[0].size(); }
    bool empty() const { return heaps_[0].empty(); }

    Id insert(T value) {
        Id id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
            values_[id] = std::move(value);
        } else {
            id = values_.size();
            values_.push_back(std::move(value));
            where_.emplace_back();
            alive_.push_back(false);
        }
        alive_[id] = true;
        for (std::size_t h = 0; h < H; ++h) {
            heaps_[h].push_back(id);
            sift_up(h, heaps_[h].size() - 1);
        }
        return id;
    }

    Id top_id(std::size_t h) const {
        if (empty()) throw std::out_of_range("top of empty heap");
        return heaps_[h][0];
    }
    const T& top(std::size_t h) const { return values_[top_id(h)]; }
    const T& get(Id id) const { return values_[id]; }
    bool contains(Id id) const { return id < values_.size() && alive_[id]; }

    T pop(std::size_t h) {
        Id id = top_id(h);
        T v = values_[id];
        erase(id);
        return v;
    }

    void erase(Id id) {
        if (!contains(id)) throw std::out_of_range("erase of absent record");
        for (std::size_t h = 0; h < H; ++h) remove_at(h, where_[id][h]);
        alive_[id] = false;
        free_.push_back(id);
    }

    void clear() {
        for (auto& hp : heaps_) hp.clear();
        values_.clear();
        where_.clear();
        alive_.clear();
        free_.clear();
    }

    // Visits records of heap h in heap order without modifying the structure.
    // f(id, value) returns false to stop.
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

    // Heap property and back-pointer consistency.
    bool audit() const {
        for (std::size_t h = 0; h < H; ++h) {
            const auto& hp = heaps_[h];
            for (std::size_t i = 0; i < hp.size(); ++i) {
                if (!alive_[hp[i]] || where_[hp[i]][h] != i) return false;
                if (i > 0 && less_(h, values_[hp[i]], values_[hp[(i - 1) / 2]])) return false;
            }
        }
        std::size_t alive = 0;
        for (bool a : alive_) alive += a;
        for (auto& hp : heaps_)
            if (hp.size() != alive) return false;
        return true;
    }

private:
    Less less_;
    std::vector<T> values_;
    std::vector<std::array<std::size_t, H>> where_;
    std::vector<bool> alive_;
    std::array<std::vector<Id>, H> heaps_;
    std::vector<Id> free_;
    mutable std::vector<std::size_t> scratch_;

    bool before(std::size_t h, Id a, Id b) const { return less_(h, values_[a], values_[b]); }

    void place(std::size_t h, std::size_t i, Id id) {
        heaps_[h][i] = id;
        where_[id][h] = i;
    }

    std::size_t sift_up(std::size_t h, std::size_t i) {
        auto& hp = heaps_[h];
        const Id id = hp[i];
        while (i > 0) {
            std::size_t p = (i - 1) / 2;
            if (!before(h, id, hp[p])) break;
            place(h, i, hp[p]);
            i = p;
        }
        place(h, i, id);
        return i;
    }

    void sift_down(std::size_t h, std::size_t i) {
        auto& hp = heaps_[h];
        const std::size_t n = hp.size();
        const Id id = hp[i];
        for (;;) {
            std::size_t c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && before(h, hp[c + 1], hp[c])) ++c;
            if (!before(h, hp[c], id)) break;
            place(h, i, hp[c]);
            i = c;
        }
        place(h, i, id);
    }

    void remove_at(std::size_t h, std::size_t i) {
        auto& hp = heaps_[h];
        const Id last = hp.back();
        hp.pop_back();
        if (i < hp.size()) {
            place(h, i, last);
            if (sift_up(h, i) == i) sift_down(h, i);
        }
    }
};

}  // namespace audb
