#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "algebra.hpp"
#include "det.hpp"
#include "native.hpp"
#include "ordering.hpp"
#include "window.hpp"

namespace audb {

struct PlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Engine { Reference, Native };

struct PlanNode;
using Plan = std::shared_ptr<const PlanNode>;

struct PlanNode {
    enum class Kind { Scan, Select, Project, Join, Union, Aggregate, Sort, Topk, Window } kind;
    std::string relation;
    Plan left, right;
    Expr pred;
    std::vector<Target> targets;
    std::vector<std::string> group_by;
    AggFunc func = AggFunc::Sum;
    std::string attr, as;
    std::vector<SortKey> order;
    std::uint64_t k = 0;
    long l = 0, u = 0;
    std::optional<Engine> engine;
};

using Database = std::map<std::string, AuRelation>;
using DetDatabase = std::map<std::string, BagRelation>;

namespace plan_detail {

using nlohmann::json;

inline const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw PlanError(std::string("missing field '") + name + "'");
    return j.at(name);
}

inline std::string str_field(const json& j, const char* name) {
    const json& f = field(j, name);
    if (!f.is_string()) throw PlanError(std::string("field '") + name + "' must be a string");
    return f.get<std::string>();
}

inline Scalar scalar_of(const json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw PlanError("constant must be a number, string or bool");
}

}  // namespace plan_detail

inline Expr parse_expr(const nlohmann::json& j) {
    using namespace plan_detail;
    if (!j.is_object()) throw PlanError("expression must be an object");
    if (j.contains("var")) return var(str_field(j, "var"));
    if (j.contains("const")) return cst(scalar_of(j.at("const")));
    std::string op = str_field(j, "op");
    const json& a = field(j, "args");
    if (!a.is_array()) throw PlanError("expression args must be an array");
    std::vector<Expr> args;
    for (auto& x : a) args.push_back(parse_expr(x));
    auto arity = [&](std::size_t n) {
        if (args.size() != n) throw PlanError("operator " + op + " takes " + std::to_string(n) + " arguments");
    };
    if (op == "not") {
        arity(1);
        return neg(args[0]);
    }
    if (op == "if") {
        arity(3);
        return ite(args[0], args[1], args[2]);
    }
    arity(2);
    if (op == "+") return add(args[0], args[1]);
    if (op == "-") return sub(args[0], args[1]);
    if (op == "*") return mul(args[0], args[1]);
    if (op == "and") return land(args[0], args[1]);
    if (op == "or") return lor(args[0], args[1]);
    if (op == "=") return eq(args[0], args[1]);
    if (op == "!=") return ne(args[0], args[1]);
    if (op == "<") return lt(args[0], args[1]);
    if (op == "<=") return le(args[0], args[1]);
    if (op == ">") return gt(args[0], args[1]);
    if (op == ">=") return ge(args[0], args[1]);
    throw PlanError("unknown operator: " + op);
}

inline Plan parse_plan(const nlohmann::json& j) {
    using namespace plan_detail;
    using K = PlanNode::Kind;
    auto n = std::make_shared<PlanNode>();
    std::string op = str_field(j, "op");
    auto strings = [&](const char* name) {
        std::vector<std::string> v;
        if (!j.contains(name)) return v;
        for (auto& x : j.at(name)) {
            if (!x.is_string()) throw PlanError(std::string("field '") + name + "' must list names");
            v.push_back(x.get<std::string>());
        }
        return v;
    };
    auto order = [&] {
        std::vector<SortKey> v;
        for (auto& x : field(j, "order")) {
            std::string dir = x.contains("dir") ? str_field(x, "dir") : "asc";
            if (dir != "asc" && dir != "desc") throw PlanError("sort direction must be asc or desc");
            v.push_back({str_field(x, "attr"), dir == "desc"});
        }
        return v;
    };
    auto func = [&] {
        try {
            return parse_agg(str_field(j, "func"));
        } catch (const std::invalid_argument& e) {
            throw PlanError(e.what());
        }
    };
    if (j.contains("engine")) {
        std::string e = str_field(j, "engine");
        if (e == "reference") n->engine = Engine::Reference;
        else if (e == "native") n->engine = Engine::Native;
        else throw PlanError("unknown engine: " + e);
    }
    if (op == "scan") {
        n->kind = K::Scan;
        n->relation = str_field(j, "input");
    } else if (op == "select") {
        n->kind = K::Select;
        n->left = parse_plan(field(j, "input"));
        n->pred = parse_expr(field(j, "pred"));
    } else if (op == "project") {
        n->kind = K::Project;
        n->left = parse_plan(field(j, "input"));
        for (auto& t : field(j, "targets")) n->targets.push_back({parse_expr(field(t, "expr")), str_field(t, "as")});
    } else if (op == "join") {
        n->kind = K::Join;
        n->left = parse_plan(field(j, "left"));
        n->right = parse_plan(field(j, "right"));
        n->pred = j.contains("pred") ? parse_expr(j.at("pred")) : cst(true);
    } else if (op == "union") {
        n->kind = K::Union;
        n->left = parse_plan(field(j, "left"));
        n->right = parse_plan(field(j, "right"));
    } else if (op == "aggregate") {
        n->kind = K::Aggregate;
        n->left = parse_plan(field(j, "input"));
        n->group_by = strings("group_by");
        n->func = func();
        n->attr = j.contains("attr") ? str_field(j, "attr") : "";
        if (n->attr.empty() && n->func != AggFunc::Count) throw PlanError("aggregate needs 'attr'");
        n->as = str_field(j, "as");
    } else if (op == "sort" || op == "topk") {
        n->kind = op == "sort" ? K::Sort : K::Topk;
        n->left = parse_plan(field(j, "input"));
        n->order = order();
        n->as = j.contains("as") ? str_field(j, "as") : "pos";
        if (op == "topk") {
            const json& k = field(j, "k");
            if (!k.is_number_integer() || k.get<long long>() < 1) throw PlanError("topk needs an integer k >= 1");
            n->k = k.get<std::uint64_t>();
        }
    } else if (op == "window") {
        n->kind = K::Window;
        n->left = parse_plan(field(j, "input"));
        n->func = func();
        n->attr = j.contains("attr") ? str_field(j, "attr") : "";
        if (n->attr.empty() && n->func != AggFunc::Count) throw PlanError("window needs 'attr'");
        n->as = str_field(j, "as");
        n->group_by = strings("partition_by");
        n->order = order();
        const json& f = field(j, "frame");
        if (!f.is_array() || f.size() != 2 || !f[0].is_number_integer() || !f[1].is_number_integer())
            throw PlanError("frame must be [l, u] integers");
        n->l = f[0].get<long>();
        n->u = f[1].get<long>();
        if (n->l > n->u) throw PlanError("frame has l > u");
        if (n->func == AggFunc::Avg && (n->l > 0 || n->u < 0)) throw PlanError("avg frame must contain offset 0");
    } else {
        throw PlanError("unknown plan operator: " + op);
    }
    return n;
}

inline Plan parse_plan_string(const std::string& s) {
    try {
        return parse_plan(nlohmann::json::parse(s));
    } catch (const nlohmann::json::exception& e) {
        throw PlanError(std::string("invalid plan json: ") + e.what());
    }
}

inline WindowSpec window_spec(const PlanNode& n) { return {n.func, n.attr, n.as, n.group_by, n.order, n.l, n.u}; }

inline AuRelation execute(const Plan& p, const Database& db, Engine engine = Engine::Reference) {
    using K = PlanNode::Kind;
    const PlanNode& n = *p;
    Engine e = n.engine.value_or(engine);
    switch (n.kind) {
    case K::Scan: {
        auto it = db.find(n.relation);
        if (it == db.end()) throw PlanError("unknown relation: " + n.relation);
        return it->second;
    }
    case K::Select: return select(execute(n.left, db, engine), n.pred);
    case K::Project: return project(execute(n.left, db, engine), n.targets);
    case K::Join: return join(execute(n.left, db, engine), execute(n.right, db, engine), n.pred);
    case K::Union: return au_union(execute(n.left, db, engine), execute(n.right, db, engine));
    case K::Aggregate: return aggregate(execute(n.left, db, engine), n.group_by, n.func, n.attr, n.as);
    case K::Sort: {
        AuRelation in = execute(n.left, db, engine);
        return e == Engine::Native ? native_sort(in, n.order, n.as) : sort(in, n.order, n.as);
    }
    case K::Topk: {
        AuRelation in = execute(n.left, db, engine);
        return e == Engine::Native ? native_topk(in, n.order, n.as, n.k) : topk(in, n.order, n.as, n.k);
    }
    case K::Window: {
        AuRelation in = execute(n.left, db, engine);
        WindowSpec w = window_spec(n);
        if (e == Engine::Native && w.partition_by.empty()) return native_window(in, w);
        return window_aggregate(in, w);
    }
    }
    throw PlanError("bad plan");
}

inline BagRelation execute_det(const Plan& p, const DetDatabase& db) {
    using K = PlanNode::Kind;
    const PlanNode& n = *p;
    switch (n.kind) {
    case K::Scan: {
        auto it = db.find(n.relation);
        if (it == db.end()) throw PlanError("unknown relation: " + n.relation);
        return it->second;
    }
    case K::Select: return det::select(execute_det(n.left, db), n.pred);
    case K::Project: return det::project(execute_det(n.left, db), n.targets);
    case K::Join: return det::join(execute_det(n.left, db), execute_det(n.right, db), n.pred);
    case K::Union: return det::bag_union(execute_det(n.left, db), execute_det(n.right, db));
    case K::Aggregate: return det::aggregate(execute_det(n.left, db), n.group_by, n.func, n.attr, n.as);
    case K::Sort: return det::sort(execute_det(n.left, db), n.order, n.as);
    case K::Topk: return det::topk(execute_det(n.left, db), n.order, n.as, n.k);
    case K::Window:
        return det::window(execute_det(n.left, db), n.func, n.attr, n.as, n.group_by, n.order, n.l, n.u);
    }
    throw PlanError("bad plan");
}

inline DetDatabase sg_database(const Database& db) {
    DetDatabase out;
    for (auto& [name, r] : db) out.emplace(name, sg_world(r));
    return out;
}

}  // namespace audb
