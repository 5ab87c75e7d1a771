#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace audb {

struct TypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { Real, Text, Bool };

inline const char* kind_name(Kind k) {
    switch (k) {
    case Kind::Real: return "real";
    case Kind::Text: return "text";
    case Kind::Bool: return "bool";
    }
    return "?";
}

class Scalar {
public:
    Scalar() : Scalar(0.0) {}
    Scalar(double d) : kind_(Kind::Real) { u_.d = d; }
    Scalar(int i) : Scalar(static_cast<double>(i)) {}
    Scalar(long i) : Scalar(static_cast<double>(i)) {}
    Scalar(long long i) : Scalar(static_cast<double>(i)) {}
    Scalar(unsigned long i) : Scalar(static_cast<double>(i)) {}
    Scalar(unsigned long long i) : Scalar(static_cast<double>(i)) {}
    Scalar(bool b) : kind_(Kind::Bool) { u_.b = b; }
    Scalar(std::string s) : kind_(Kind::Text) { u_.s = new Text{1, std::move(s)}; }
    Scalar(const char* s) : Scalar(std::string(s)) {}

    Scalar(const Scalar& o) : kind_(o.kind_), u_(o.u_) { retain(); }
    Scalar(Scalar&& o) noexcept : kind_(o.kind_), u_(o.u_) { o.kind_ = Kind::Real; }
    Scalar& operator=(const Scalar& o) {
        if (this != &o) {
            o.retain();
            release();
            kind_ = o.kind_;
            u_ = o.u_;
        }
        return *this;
    }
    Scalar& operator=(Scalar&& o) noexcept {
        if (this != &o) {
            release();
            kind_ = o.kind_;
            u_ = o.u_;
            o.kind_ = Kind::Real;
        }
        return *this;
    }
    ~Scalar() { release(); }

    Kind kind() const { return kind_; }

    bool is_real() const { return kind_ == Kind::Real; }
    bool is_text() const { return kind_ == Kind::Text; }
    bool is_bool() const { return kind_ == Kind::Bool; }

    double real() const {
        if (!is_real()) throw TypeError(std::string("expected real, got ") + kind_name(kind()));
        return u_.d;
    }
    const std::string& text() const {
        if (!is_text()) throw TypeError(std::string("expected text, got ") + kind_name(kind()));
        return u_.s->value;
    }
    bool boolean() const {
        if (!is_bool()) throw TypeError(std::string("expected bool, got ") + kind_name(kind()));
        return u_.b;
    }

    // Three-way comparison within one kind; mixing kinds is a TypeError.
    friend int compare(const Scalar& a, const Scalar& b) {
        if (a.kind_ != b.kind_)
            throw TypeError(std::string("cannot compare ") + kind_name(a.kind()) + " with " +
                            kind_name(b.kind()));
        switch (a.kind_) {
        case Kind::Real: {
            double x = a.u_.d, y = b.u_.d;
            return x < y ? -1 : (y < x ? 1 : 0);
        }
        case Kind::Text: {
            int c = a.u_.s->value.compare(b.u_.s->value);
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        default: return int(a.u_.b) - int(b.u_.b);
        }
    }

    friend bool operator==(const Scalar& a, const Scalar& b) { return compare(a, b) == 0; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return compare(a, b) < 0; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return compare(a, b) <= 0; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return compare(a, b) > 0; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return compare(a, b) >= 0; }

    // Total order used for container keys: kind first, then value.
    friend bool key_less(const Scalar& a, const Scalar& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        return compare(a, b) < 0;
    }

    std::string str() const {
        switch (kind_) {
        case Kind::Real: return format_real(u_.d);
        case Kind::Text: return u_.s->value;
        default: return u_.b ? "true" : "false";
        }
    }

    static std::string format_real(double d) {
        if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
        if (std::isnan(d)) return "nan";
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, d);
        return std::string(buf, res.ptr);
    }

private:
    // Immutable text shared between copies.
    struct Text {
        std::atomic<std::size_t> refs;
        const std::string value;
    };
    union Payload {
        double d;
        bool b;
        Text* s;
    };

    Kind kind_;
    Payload u_;

    void retain() const {
        if (kind_ == Kind::Text) u_.s->refs.fetch_add(1, std::memory_order_relaxed);
    }
    void release() {
        if (kind_ == Kind::Text && u_.s->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) delete u_.s;
    }
};

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) {
    if (s.is_text()) return os << '"' << s.text() << '"';
    return os << s.str();
}

inline const Scalar& smin(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
inline const Scalar& smax(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest code point; stands in for the top of the text domain.
inline const std::string& text_top() {
    static const std::string s = "\xF4\x8F\xBF\xBF";
    return s;
}

struct RangeValue {
    Scalar lb, sg, ub;

    RangeValue() = default;
    RangeValue(Scalar v) : lb(v), sg(v), ub(std::move(v)) {}
    RangeValue(double v) : RangeValue(Scalar(v)) {}
    RangeValue(int v) : RangeValue(Scalar(v)) {}
    RangeValue(bool v) : RangeValue(Scalar(v)) {}
    RangeValue(const char* v) : RangeValue(Scalar(v)) {}
    RangeValue(std::string v) : RangeValue(Scalar(std::move(v))) {}
    RangeValue(Scalar l, Scalar s, Scalar u) : lb(std::move(l)), sg(std::move(s)), ub(std::move(u)) {
        if (lb.kind() != sg.kind() || sg.kind() != ub.kind())
            throw TypeError("range value components have different kinds");
        if (sg < lb || ub < sg)
            throw InvalidRange("range value violates lb <= sg <= ub: <" + lb.str() + "," + sg.str() +
                               "," + ub.str() + ">");
    }

    Kind kind() const { return lb.kind(); }
    bool certain() const { return lb == ub; }

    friend bool operator==(const RangeValue& a, const RangeValue& b) {
        return a.lb.kind() == b.lb.kind() && a.lb == b.lb && a.sg == b.sg && a.ub == b.ub;
    }
    friend bool operator!=(const RangeValue& a, const RangeValue& b) { return !(a == b); }

    friend bool key_less(const RangeValue& a, const RangeValue& b) {
        if (key_less(a.lb, b.lb)) return true;
        if (key_less(b.lb, a.lb)) return false;
        if (key_less(a.sg, b.sg)) return true;
        if (key_less(b.sg, a.sg)) return false;
        return key_less(a.ub, b.ub);
    }
};

inline std::ostream& operator<<(std::ostream& os, const RangeValue& v) {
    if (v.certain()) return os << v.lb;
    return os << '<' << v.lb << ',' << v.sg << ',' << v.ub << '>';
}

// c lies within [v.lb, v.ub].
inline bool value_bounds(const RangeValue& v, const Scalar& c) { return v.lb <= c && c <= v.ub; }

inline RangeValue range_hull(const RangeValue& a, const RangeValue& b, const Scalar& sg) {
    return RangeValue(smin(a.lb, b.lb), sg, smax(a.ub, b.ub));
}

inline bool overlaps(const RangeValue& a, const RangeValue& b) { return a.lb <= b.ub && b.lb <= a.ub; }

inline bool contains(const RangeValue& outer, const RangeValue& inner) {
    return outer.lb <= inner.lb && inner.ub <= outer.ub;
}

inline Scalar clamp_to(const Scalar& v, const Scalar& lo, const Scalar& hi) {
    if (v < lo) return lo;
    if (hi < v) return hi;
    return v;
}

struct MultTriple {
    std::uint64_t lb = 0, sg = 0, ub = 0;

    MultTriple() = default;
    MultTriple(std::uint64_t l, std::uint64_t s, std::uint64_t u) : lb(l), sg(s), ub(u) {
        if (l > s || s > u) throw InvalidRange("multiplicity triple violates lb <= sg <= ub");
    }
    static MultTriple one() { return {1, 1, 1}; }

    bool zero() const { return ub == 0; }

    friend MultTriple operator+(const MultTriple& a, const MultTriple& b) {
        return {a.lb + b.lb, a.sg + b.sg, a.ub + b.ub};
    }
    friend MultTriple operator*(const MultTriple& a, const MultTriple& b) {
        return {a.lb * b.lb, a.sg * b.sg, a.ub * b.ub};
    }
    MultTriple& operator+=(const MultTriple& o) { return *this = *this + o; }
    friend bool operator==(const MultTriple&, const MultTriple&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const MultTriple& m) {
    return os << '(' << m.lb << ',' << m.sg << ',' << m.ub << ')';
}

// Range boolean as a triple of bools.
struct RangeBool {
    bool lb = false, sg = false, ub = false;
    friend bool operator==(const RangeBool&, const RangeBool&) = default;
    RangeValue value() const { return RangeValue(Scalar(lb), Scalar(sg), Scalar(ub)); }
    MultTriple mult() const { return {std::uint64_t(lb), std::uint64_t(sg), std::uint64_t(ub)}; }
};

inline RangeBool to_range_bool(const RangeValue& v) {
    return {v.lb.boolean(), v.sg.boolean(), v.ub.boolean()};
}

enum class AggFunc { Sum, Count, Min, Max, Avg };

inline AggFunc parse_agg(const std::string& s) {
    if (s == "sum") return AggFunc::Sum;
    if (s == "count") return AggFunc::Count;
    if (s == "min") return AggFunc::Min;
    if (s == "max") return AggFunc::Max;
    if (s == "avg") return AggFunc::Avg;
    throw std::invalid_argument("unknown aggregate function: " + s);
}

inline const char* agg_name(AggFunc f) {
    switch (f) {
    case AggFunc::Sum: return "sum";
    case AggFunc::Count: return "count";
    case AggFunc::Min: return "min";
    case AggFunc::Max: return "max";
    case AggFunc::Avg: return "avg";
    }
    return "?";
}

// Monoids used by combine and aggregation.
enum class Monoid { Sum, Min, Max };

inline double monoid_neutral(Monoid m) {
    switch (m) {
    case Monoid::Sum: return 0.0;
    case Monoid::Min: return kInf;
    case Monoid::Max: return -kInf;
    }
    return 0.0;
}

inline double monoid_add(Monoid m, double a, double b) {
    switch (m) {
    case Monoid::Sum: return a + b;
    case Monoid::Min: return std::min(a, b);
    case Monoid::Max: return std::max(a, b);
    }
    return a;
}

// k acting on m: repeated addition for SUM, idempotent for MIN and MAX.
inline double monoid_scale(Monoid mo, std::uint64_t k, double m) {
    if (k == 0) return monoid_neutral(mo);
    if (mo == Monoid::Sum) return static_cast<double>(k) * m;
    return m;
}

inline RangeValue combine(const MultTriple& k, const RangeValue& m, Monoid mo) {
    double l = m.lb.real(), s = m.sg.real(), u = m.ub.real();
    double c[4] = {monoid_scale(mo, k.lb, l), monoid_scale(mo, k.lb, u), monoid_scale(mo, k.ub, l),
                   monoid_scale(mo, k.ub, u)};
    double lo = c[0], hi = c[0];
    for (double x : c) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return RangeValue(lo, monoid_scale(mo, k.sg, s), hi);
}

}  // namespace audb
