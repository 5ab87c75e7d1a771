#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plan.hpp"
#include "relation.hpp"

namespace audb {

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultWorldCap = 100000;

// Template row: candidate values per attribute, candidate multiplicities, and the
// index of the selected-guess choice for each attribute followed by the multiplicity.
struct TemplateRow {
    std::vector<std::vector<Scalar>> values;
    std::vector<std::uint64_t> mults;
    std::vector<std::size_t> sg;
};

// Product mode: worlds are all combinations of row choices. Aligned mode: world w
// takes choice w of every row, so rows may be correlated.
struct IncompleteSpec {
    Schema schema;
    std::vector<TemplateRow> rows;
    bool aligned = false;
    std::size_t sg_world = 0;
};

using DatabaseSpec = std::map<std::string, IncompleteSpec>;

inline void validate(const IncompleteSpec& s) {
    std::size_t width = 0;
    for (auto& r : s.rows) {
        if (r.values.size() != s.schema.size()) throw OracleError("template row arity does not match schema");
        if (r.mults.empty()) throw OracleError("empty multiplicity choices");
        for (std::size_t a = 0; a < r.values.size(); ++a) {
            if (r.values[a].empty()) throw OracleError("empty value choices");
            for (auto& v : r.values[a])
                if (v.kind() != s.schema.attrs[a].kind) throw OracleError("choice kind does not match schema");
        }
        if (s.aligned) {
            std::size_t w = r.mults.size();
            if (width == 0) width = w;
            if (w != width) throw OracleError("aligned rows must list one choice per world");
            for (auto& v : r.values)
                if (v.size() != width) throw OracleError("aligned rows must list one choice per world");
        } else {
            if (r.sg.size() != r.values.size() + 1) throw OracleError("sg indices must cover attributes and multiplicity");
            for (std::size_t a = 0; a < r.values.size(); ++a)
                if (r.sg[a] >= r.values[a].size()) throw OracleError("sg index out of range");
            if (r.sg.back() >= r.mults.size()) throw OracleError("sg index out of range");
        }
    }
    if (s.aligned && width > 0 && s.sg_world >= width) throw OracleError("sg world index out of range");
}

inline std::uint64_t world_count(const IncompleteSpec& s) {
    validate(s);
    const std::uint64_t big = std::numeric_limits<std::uint64_t>::max() / 1024;
    if (s.aligned) return s.rows.empty() ? 1 : s.rows[0].mults.size();
    std::uint64_t n = 1;
    for (auto& r : s.rows) {
        std::uint64_t c = r.mults.size();
        for (auto& v : r.values) c = std::min(big, c * v.size());
        n = std::min(big, n * c);
    }
    return n;
}

inline std::uint64_t world_count(const DatabaseSpec& db) {
    const std::uint64_t big = std::numeric_limits<std::uint64_t>::max() / 1024;
    std::uint64_t n = 1;
    for (auto& [name, s] : db) n = std::min(big, n * world_count(s));
    return n;
}

inline std::vector<BagRelation> enumerate_worlds(const IncompleteSpec& s, std::uint64_t cap = kDefaultWorldCap) {
    std::uint64_t total = world_count(s);
    if (total > cap) throw OracleError("world count " + std::to_string(total) + " exceeds cap " + std::to_string(cap));
    std::vector<BagRelation> worlds;
    if (s.aligned) {
        for (std::uint64_t w = 0; w < total; ++w) {
            BagRelation b(s.schema);
            for (auto& r : s.rows) {
                Tuple t;
                for (auto& v : r.values) t.push_back(v[w]);
                b.add(std::move(t), r.mults[w]);
            }
            worlds.push_back(std::move(b));
        }
        return worlds;
    }
    // Mixed-radix counter over every choice slot.
    std::vector<std::size_t> radix, digit;
    for (auto& r : s.rows) {
        for (auto& v : r.values) radix.push_back(v.size());
        radix.push_back(r.mults.size());
    }
    digit.assign(radix.size(), 0);
    for (std::uint64_t w = 0; w < total; ++w) {
        BagRelation b(s.schema);
        std::size_t d = 0;
        for (auto& r : s.rows) {
            Tuple t;
            for (auto& v : r.values) t.push_back(v[digit[d++]]);
            b.add(std::move(t), r.mults[digit[d++]]);
        }
        worlds.push_back(std::move(b));
        for (std::size_t i = 0; i < digit.size(); ++i) {
            if (++digit[i] < radix[i]) break;
            digit[i] = 0;
        }
    }
    return worlds;
}

inline std::vector<DetDatabase> enumerate_worlds(const DatabaseSpec& db, std::uint64_t cap = kDefaultWorldCap) {
    std::uint64_t total = world_count(db);
    if (total > cap) throw OracleError("world count " + std::to_string(total) + " exceeds cap " + std::to_string(cap));
    std::vector<DetDatabase> out{DetDatabase{}};
    for (auto& [name, s] : db) {
        auto ws = enumerate_worlds(s, cap);
        std::vector<DetDatabase> next;
        for (auto& partial : out)
            for (auto& w : ws) {
                DetDatabase d = partial;
                d.emplace(name, w);
                next.push_back(std::move(d));
            }
        out = std::move(next);
    }
    return out;
}

// Bounding AU relation: min, designated and max choice per attribute and multiplicity.
inline AuRelation derive_au(const IncompleteSpec& s) {
    validate(s);
    AuRelation r(s.schema);
    for (auto& row : s.rows) {
        auto pick = [&](std::size_t slot, std::size_t n) { return s.aligned ? s.sg_world : row.sg[slot] % n; };
        RangeTuple t;
        for (std::size_t a = 0; a < row.values.size(); ++a) {
            auto& v = row.values[a];
            Scalar lo = v[0], hi = v[0];
            for (auto& x : v) {
                lo = smin(lo, x);
                hi = smax(hi, x);
            }
            t.emplace_back(lo, v[pick(a, v.size())], hi);
        }
        auto [mlo, mhi] = std::minmax_element(row.mults.begin(), row.mults.end());
        r.add(std::move(t), MultTriple{*mlo, row.mults[pick(row.values.size(), row.mults.size())], *mhi});
    }
    return r;
}

inline Database derive_au(const DatabaseSpec& db) {
    Database out;
    for (auto& [name, s] : db) out.emplace(name, derive_au(s));
    return out;
}

struct PreservationReport {
    bool ok = true;
    std::size_t worlds = 0;
    std::optional<std::size_t> failing_world;
    std::string witness;
};

inline std::string describe(const Tuple& t) {
    std::ostringstream o;
    o << '(';
    for (std::size_t i = 0; i < t.size(); ++i) o << (i ? "," : "") << t[i];
    o << ')';
    return o.str();
}

inline PreservationReport check_preservation(const AuRelation& au, const std::vector<BagRelation>& world_results) {
    PreservationReport rep;
    rep.worlds = world_results.size();
    for (std::size_t w = 0; w < world_results.size(); ++w) {
        const BagRelation& b = world_results[w];
        if (bounds_world(au, b)) continue;
        rep.ok = false;
        rep.failing_world = w;
        if (!(au.schema() == b.schema())) {
            rep.witness = "schema mismatch";
            return rep;
        }
        for (auto& [t, m] : b.rows()) {
            bool any = false;
            for (auto& [rt, rm] : au.rows()) any = any || tuple_bounded(rt, t);
            if (!any) {
                rep.witness = "tuple " + describe(t) + " x" + std::to_string(m) + " has no bounding row";
                return rep;
            }
        }
        rep.witness = "no tuple matching satisfies the multiplicity bounds";
        return rep;
    }
    BagRelation sg = sg_world(au);
    bool found = world_results.empty() && sg.size() == 0;
    for (auto& b : world_results) found = found || b == sg;
    if (!found) {
        rep.ok = false;
        rep.witness = "selected-guess world of the result matches no possible world";
    }
    return rep;
}

struct CheckResult {
    PreservationReport report;
    AuRelation au;
    std::vector<BagRelation> world_results;
    std::vector<DetDatabase> worlds;
};

// Runs the plan over the derived AU database and over every world.
inline CheckResult check_plan(const Plan& plan, const DatabaseSpec& spec, Engine engine = Engine::Reference,
                              std::uint64_t cap = kDefaultWorldCap) {
    CheckResult r;
    r.worlds = enumerate_worlds(spec, cap);
    r.au = execute(plan, derive_au(spec), engine);
    for (auto& w : r.worlds) r.world_results.push_back(execute_det(plan, w));
    r.report = check_preservation(r.au, r.world_results);
    return r;
}

struct Interval {
    double lo, hi;
};

struct TightBounds {
    std::map<Tuple, std::pair<std::uint64_t, std::uint64_t>, TupleLess> mult;
    std::map<Tuple, Interval, TupleLess> value;
    std::vector<std::string> errors;
};

inline TightBounds tight_bounds(const std::vector<BagRelation>& world_results, const std::vector<std::string>& anchor,
                                const std::string& column) {
    TightBounds tb;
    std::map<Tuple, std::size_t, TupleLess> seen;
    for (std::size_t w = 0; w < world_results.size(); ++w)
        for (auto& [t, m] : world_results[w].rows()) {
            auto [it, fresh] = tb.mult.try_emplace(t, std::pair<std::uint64_t, std::uint64_t>{m, m});
            if (!fresh) {
                it->second.first = std::min(it->second.first, m);
                it->second.second = std::max(it->second.second, m);
            }
            seen[t] += 1;
        }
    for (auto& [t, mm] : tb.mult)
        if (seen[t] < world_results.size()) mm.first = 0;
    if (anchor.empty() && column.empty()) return tb;
    for (std::size_t w = 0; w < world_results.size(); ++w) {
        const BagRelation& b = world_results[w];
        std::vector<std::size_t> ai;
        for (auto& a : anchor) ai.push_back(b.schema().index_of(a));
        std::size_t vi = b.schema().index_of(column);
        std::map<Tuple, int, TupleLess> per_world;
        for (auto& [t, m] : b.rows()) {
            Tuple k;
            for (auto i : ai) k.push_back(t[i]);
            if ((per_world[k] += int(m)) > 1)
                tb.errors.push_back("anchor " + describe(k) + " is not a key in world " + std::to_string(w));
            double v = t[vi].real();
            auto [it, fresh] = tb.value.try_emplace(k, Interval{v, v});
            if (!fresh) {
                it->second.lo = std::min(it->second.lo, v);
                it->second.hi = std::max(it->second.hi, v);
            }
        }
    }
    return tb;
}

inline double bound_recall(Interval approx, Interval tight) {
    double a = approx.lo, b = approx.hi, c = tight.lo, d = tight.hi;
    if (c == d) return a <= c && c <= b ? 1.0 : 0.0;
    return std::clamp((std::min(b, d) - std::max(a, c)) / (d - c), 0.0, 1.0);
}

struct Accuracy {
    double value;
    bool disjoint;
};

inline Accuracy bound_accuracy(Interval approx, Interval tight) {
    double a = approx.lo, b = approx.hi, c = tight.lo, d = tight.hi;
    double num = std::max(b, d) - std::min(a, c), den = std::min(b, d) - std::max(a, c);
    if (num == 0) return {1.0, false};
    if (den == 0) return {kInf, false};
    return {num / den, den < 0};
}

namespace oracle_detail {

using nlohmann::json;

inline Kind kind_of(const std::string& k) {
    if (k == "real") return Kind::Real;
    if (k == "text") return Kind::Text;
    if (k == "bool") return Kind::Bool;
    throw OracleError("unknown kind: " + k);
}

inline Scalar scalar(const json& j, Kind k) {
    if (k == Kind::Real && j.is_number()) return j.get<double>();
    if (k == Kind::Text && j.is_string()) return j.get<std::string>();
    if (k == Kind::Bool && j.is_boolean()) return j.get<bool>();
    throw OracleError("choice does not match attribute kind: " + j.dump());
}

inline IncompleteSpec parse_relation(const json& j) {
    IncompleteSpec s;
    std::vector<Attribute> attrs;
    for (auto& a : j.at("schema")) {
        if (a.is_string()) attrs.push_back({a.get<std::string>(), Kind::Real});
        else attrs.push_back({a.at("name").get<std::string>(), kind_of(a.value("kind", "real"))});
    }
    s.schema = Schema(attrs);
    s.aligned = j.value("aligned", false);
    s.sg_world = j.value("sg_world", std::size_t(0));
    for (auto& r : j.value("rows", json::array())) {
        TemplateRow t;
        auto& vals = r.at("values");
        if (vals.size() != attrs.size()) throw OracleError("template row arity does not match schema");
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            std::vector<Scalar> c;
            if (vals[a].is_array()) {
                for (auto& x : vals[a]) c.push_back(scalar(x, attrs[a].kind));
            } else {
                c.push_back(scalar(vals[a], attrs[a].kind));
            }
            t.values.push_back(std::move(c));
        }
        if (r.contains("mult")) {
            auto& m = r.at("mult");
            if (m.is_array())
                for (auto& x : m) t.mults.push_back(x.get<std::uint64_t>());
            else
                t.mults.push_back(m.get<std::uint64_t>());
        } else {
            t.mults = std::vector<std::uint64_t>(s.aligned ? t.values.empty() ? 1 : t.values[0].size() : 1, 1);
        }
        if (r.contains("sg"))
            for (auto& x : r.at("sg")) t.sg.push_back(x.get<std::size_t>());
        else
            t.sg.assign(attrs.size() + 1, 0);
        s.rows.push_back(std::move(t));
    }
    validate(s);
    return s;
}

}  // namespace oracle_detail

// {"relations": {"R": {...}}} or a single relation object (named by "name", default R).
inline DatabaseSpec parse_spec(const nlohmann::json& j) {
    DatabaseSpec db;
    try {
        if (j.contains("relations")) {
            for (auto& [name, r] : j.at("relations").items()) db.emplace(name, oracle_detail::parse_relation(r));
        } else {
            db.emplace(j.value("name", std::string("R")), oracle_detail::parse_relation(j));
        }
    } catch (const nlohmann::json::exception& e) {
        throw OracleError(std::string("invalid spec: ") + e.what());
    }
    return db;
}

}  // namespace audb
