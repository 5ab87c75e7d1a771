#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "native.hpp"

namespace audb {

// Records the operations the windowed aggregation issues against its heaps so the
// same workload can be replayed on another store.
struct HeapOp {
    enum class Kind { Insert, Pop, Walk } kind;
    std::size_t h = 0;
    std::size_t arg = 0;
};

struct HeapStream {
    std::vector<native_detail::Item> items;
    std::vector<HeapOp> ops;
    std::size_t peak = 0;
};

struct HeapTrace {
    std::vector<HeapStream> poss, openw;
};

namespace trace_detail {

inline HeapTrace*& sink() {
    static thread_local HeapTrace* t = nullptr;
    return t;
}

}  // namespace trace_detail

template <class T, std::size_t H, class Less>
class TracingHeap : public ConnectedHeap<T, H, Less> {
    using Base = ConnectedHeap<T, H, Less>;

public:
    using Id = typename Base::Id;

    explicit TracingHeap(Less less = Less()) : Base(less), items_(less.items) {}

    ~TracingHeap() {
        if (HeapTrace* t = trace_detail::sink()) {
            stream_.items = *items_;
            (H == 3 ? t->poss : t->openw).push_back(std::move(stream_));
        }
    }

    Id insert(T v) {
        stream_.ops.push_back({HeapOp::Kind::Insert, 0, std::size_t(v)});
        Id id = Base::insert(v);
        stream_.peak = std::max(stream_.peak, Base::size());
        return id;
    }

    T pop(std::size_t h) {
        stream_.ops.push_back({HeapOp::Kind::Pop, h, 0});
        return Base::pop(h);
    }

    template <class F>
    void walk(std::size_t h, F f) const {
        std::size_t steps = 0;
        Base::walk(h, [&](Id id, const T& v) {
            ++steps;
            return f(id, v);
        });
        stream_.ops.push_back({HeapOp::Kind::Walk, h, steps});
    }

private:
    const std::vector<native_detail::Item>* items_;
    mutable HeapStream stream_;
};

inline HeapTrace record_window_heaps(const AuRelation& r, const WindowSpec& w) {
    HeapTrace t;
    trace_detail::sink() = &t;
    native_window<TracingHeap>(r, w);
    trace_detail::sink() = nullptr;
    return t;
}

namespace trace_detail {

template <class Store>
std::uint64_t replay_stream(const HeapStream& s, Store& store) {
    std::uint64_t check = 0;
    for (auto& op : s.ops) {
        switch (op.kind) {
        case HeapOp::Kind::Insert: store.insert(op.arg); break;
        case HeapOp::Kind::Pop: check += store.pop(op.h); break;
        case HeapOp::Kind::Walk: {
            std::size_t left = op.arg;
            store.walk(op.h, [&](std::size_t, std::size_t v) {
                check += v;
                return --left > 0;
            });
            break;
        }
        }
    }
    return check;
}

}  // namespace trace_detail

struct ReplayResult {
    double seconds;
    std::uint64_t checksum;
};

// Replays every recorded stream on Store; the checksum sums popped and visited records.
template <template <class, std::size_t, class> class Store>
ReplayResult replay(const HeapTrace& t) {
    using namespace native_detail;
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t check = 0;
    for (auto& s : t.poss) {
        Store<std::size_t, 3, PossLess> store(PossLess{&s.items});
        check += trace_detail::replay_stream(s, store);
    }
    for (auto& s : t.openw) {
        Store<std::size_t, 2, OpenLess> store(OpenLess{&s.items});
        check += trace_detail::replay_stream(s, store);
    }
    return {std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), check};
}

}  // namespace audb
