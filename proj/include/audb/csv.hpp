#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "relation.hpp"

namespace audb {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace csv_detail {

struct Field {
    std::string text;
    bool quoted = false;
};

inline std::vector<std::vector<Field>> parse(std::istream& in) {
    std::vector<std::vector<Field>> out;
    std::vector<Field> row;
    Field cur;
    bool in_quotes = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cur.text += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                cur.text += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            cur.quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(cur));
            cur = {};
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in.peek() == '\n') in.get(c);
            row.push_back(std::move(cur));
            cur = {};
            if (!(row.size() == 1 && row[0].text.empty() && !row[0].quoted)) out.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            cur.text += c;
        }
    }
    if (in_quotes) throw CsvError("unterminated quoted field");
    if (any) {
        row.push_back(std::move(cur));
        out.push_back(std::move(row));
    }
    return out;
}

inline bool parse_real(const std::string& s, double& d) {
    if (s == "inf" || s == "+inf") {
        d = kInf;
        return true;
    }
    if (s == "-inf") {
        d = -kInf;
        return true;
    }
    if (s.empty()) return false;
    const char* b = s.data();
    if (*b == '+') ++b;
    auto res = std::from_chars(b, s.data() + s.size(), d);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_nat(const std::string& s, std::uint64_t& n) {
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline Scalar to_scalar(const Field& f, Kind k) {
    double d;
    switch (k) {
    case Kind::Real:
        if (!parse_real(f.text, d)) throw CsvError("not a real value: '" + f.text + "'");
        return d;
    case Kind::Bool:
        if (f.text == "true") return true;
        if (f.text == "false") return false;
        throw CsvError("not a bool value: '" + f.text + "'");
    case Kind::Text: return f.text;
    }
    return {};
}

inline bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
    return s.front() == ' ' || s.back() == ' ';
}

inline std::string quote(const std::string& s) {
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c;
    }
    return o + '"';
}

inline std::string field(const Scalar& v) {
    if (v.is_text()) return needs_quotes(v.text()) ? quote(v.text()) : v.text();
    return v.str();
}

inline Kind infer_kind(const std::vector<const Field*>& vals) {
    if (vals.empty()) return Kind::Real;
    bool real = true, boolean = true;
    double d;
    for (auto* f : vals) {
        if (f->quoted || !parse_real(f->text, d)) real = false;
        if (f->quoted || (f->text != "true" && f->text != "false")) boolean = false;
    }
    if (real) return Kind::Real;
    if (boolean) return Kind::Bool;
    return Kind::Text;
}

}  // namespace csv_detail

// Columns are A (certain) or A__lb, A__sg, A__ub; _m__lb/_m__sg/_m__ub hold the
// multiplicity triple. A column name may carry an explicit kind as A:text.
inline AuRelation read_au_csv(std::istream& in) {
    using namespace csv_detail;
    auto recs = parse(in);
    if (recs.empty()) throw CsvError("missing header");
    auto& header = recs[0];

    struct Col {
        std::string name;
        bool has_kind = false;
        Kind kind = Kind::Real;
        int single = -1, lb = -1, sg = -1, ub = -1;
    };
    std::vector<Col> cols;
    Col mult{"_m"};
    bool has_mult = false;

    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string h = header[i].text;
        int comp = -1;
        for (int c = 0; c < 3; ++c) {
            static const char* suf[3] = {"__lb", "__sg", "__ub"};
            std::string s = suf[c];
            if (h.size() > s.size() && h.compare(h.size() - s.size(), s.size(), s) == 0) {
                comp = c;
                h.resize(h.size() - s.size());
                break;
            }
        }
        Col* col;
        if (h == "_m") {
            col = &mult;
            has_mult = true;
        } else {
            std::string name = h, kind;
            auto colon = h.find(':');
            if (colon != std::string::npos) {
                name = h.substr(0, colon);
                kind = h.substr(colon + 1);
            }
            if (name.empty()) throw CsvError("empty column name");
            col = nullptr;
            for (auto& c : cols)
                if (c.name == name) col = &c;
            if (!col) {
                cols.push_back({name});
                col = &cols.back();
            }
            if (!kind.empty()) {
                col->has_kind = true;
                if (kind == "real") col->kind = Kind::Real;
                else if (kind == "text") col->kind = Kind::Text;
                else if (kind == "bool") col->kind = Kind::Bool;
                else throw CsvError("unknown kind: " + kind);
            }
        }
        int* slot = comp == 0 ? &col->lb : comp == 1 ? &col->sg : comp == 2 ? &col->ub : &col->single;
        if (*slot >= 0) throw CsvError("duplicate column: " + header[i].text);
        *slot = int(i);
    }
    auto check_col = [](const Col& c) {
        bool tri = c.lb >= 0 || c.sg >= 0 || c.ub >= 0;
        if (tri && (c.lb < 0 || c.sg < 0 || c.ub < 0)) throw CsvError("incomplete triple for column " + c.name);
        if (tri && c.single >= 0) throw CsvError("column " + c.name + " given both plain and as a triple");
    };
    for (auto& c : cols) check_col(c);
    if (has_mult) check_col(mult);

    for (std::size_t r = 1; r < recs.size(); ++r)
        if (recs[r].size() != header.size())
            throw CsvError("row " + std::to_string(r) + " has " + std::to_string(recs[r].size()) +
                           " fields, expected " + std::to_string(header.size()));

    std::vector<Attribute> attrs;
    for (auto& c : cols) {
        if (!c.has_kind) {
            std::vector<const Field*> vals;
            for (std::size_t r = 1; r < recs.size(); ++r)
                for (int idx : {c.single, c.lb, c.sg, c.ub})
                    if (idx >= 0) vals.push_back(&recs[r][std::size_t(idx)]);
            c.kind = infer_kind(vals);
        }
        attrs.push_back({c.name, c.kind});
    }
    AuRelation rel{Schema(attrs)};
    for (std::size_t r = 1; r < recs.size(); ++r) {
        auto& rec = recs[r];
        RangeTuple t;
        for (auto& c : cols) {
            if (c.single >= 0) {
                t.emplace_back(to_scalar(rec[std::size_t(c.single)], c.kind));
            } else {
                Scalar l = to_scalar(rec[std::size_t(c.lb)], c.kind);
                Scalar s = to_scalar(rec[std::size_t(c.sg)], c.kind);
                Scalar u = to_scalar(rec[std::size_t(c.ub)], c.kind);
                if (s < l || u < s)
                    throw CsvError("row " + std::to_string(r) + ": column " + c.name + " violates lb <= sg <= ub");
                t.emplace_back(l, s, u);
            }
        }
        MultTriple m = MultTriple::one();
        if (has_mult) {
            std::uint64_t v[3];
            int idx[3] = {mult.lb, mult.sg, mult.ub};
            if (mult.single >= 0) idx[0] = idx[1] = idx[2] = mult.single;
            for (int k = 0; k < 3; ++k)
                if (!parse_nat(rec[std::size_t(idx[k])].text, v[k]))
                    throw CsvError("row " + std::to_string(r) + ": multiplicity is not a natural number");
            if (v[0] > v[1] || v[1] > v[2])
                throw CsvError("row " + std::to_string(r) + ": multiplicity violates lb <= sg <= ub");
            m = {v[0], v[1], v[2]};
        }
        rel.add(std::move(t), m);
    }
    return rel;
}

inline AuRelation read_au_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    return read_au_csv(in);
}

inline AuRelation read_au_csv_string(const std::string& s) {
    std::istringstream in(s);
    return read_au_csv(in);
}

namespace csv_detail {

// A text column whose values all look like numbers or bools needs an explicit kind.
template <class Rel, class Get>
std::string header_name(const Rel& r, std::size_t i, Get get) {
    const auto& a = r.schema().attrs[i];
    if (a.kind != Kind::Text) return a.name;
    std::vector<Field> vals;
    for (auto& row : r.rows()) get(row, i, vals);
    std::vector<const Field*> ptrs;
    for (auto& f : vals) ptrs.push_back(&f);
    if (ptrs.empty() || infer_kind(ptrs) != Kind::Text) return a.name + ":text";
    return a.name;
}

}  // namespace csv_detail

inline void write_au_csv(std::ostream& out, const AuRelation& r) {
    using namespace csv_detail;
    const auto& s = r.schema();
    std::vector<bool> certain(s.size(), true);
    for (auto& [t, m] : r.rows())
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!t[i].certain()) certain[i] = false;
    bool first = true;
    auto sep = [&] {
        if (!first) out << ',';
        first = false;
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::string name = header_name(r, i, [](auto& row, std::size_t k, std::vector<Field>& v) {
            for (auto* x : {&row.first[k].lb, &row.first[k].sg, &row.first[k].ub}) v.push_back({x->text(), false});
        });
        if (certain[i]) {
            sep();
            out << name;
        } else {
            for (const char* suf : {"__lb", "__sg", "__ub"}) {
                sep();
                out << name << suf;
            }
        }
    }
    sep();
    out << "_m__lb,_m__sg,_m__ub\n";
    for (auto& [t, m] : r.rows()) {
        first = true;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (certain[i]) {
                sep();
                out << field(t[i].lb);
            } else {
                for (auto* x : {&t[i].lb, &t[i].sg, &t[i].ub}) {
                    sep();
                    out << field(*x);
                }
            }
        }
        sep();
        out << m.lb << ',' << m.sg << ',' << m.ub << '\n';
    }
}

inline std::string au_csv_string(const AuRelation& r) {
    std::ostringstream o;
    write_au_csv(o, r);
    return o.str();
}

inline void write_bag_csv(std::ostream& out, const BagRelation& r) {
    using namespace csv_detail;
    const auto& s = r.schema();
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << header_name(r, i, [](auto& row, std::size_t k, std::vector<Field>& v) {
            v.push_back({row.first[k].text(), false});
        }) << ',';
    }
    out << "_m\n";
    for (auto& [t, m] : r.rows()) {
        for (auto& v : t) out << field(v) << ',';
        out << m << '\n';
    }
}

inline std::string bag_csv_string(const BagRelation& r) {
    std::ostringstream o;
    write_bag_csv(o, r);
    return o.str();
}

}  // namespace audb
