#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "values.hpp"

namespace audb {

enum class Op { Var, Const, Add, Mul, Not, And, Or, Eq, Le, If };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    Op op;
    std::string name;
    Scalar value;
    std::vector<Expr> args;
};

inline Expr var(std::string name) { return std::make_shared<ExprNode>(ExprNode{Op::Var, std::move(name), {}, {}}); }
inline Expr cst(Scalar v) { return std::make_shared<ExprNode>(ExprNode{Op::Const, {}, std::move(v), {}}); }
inline Expr node(Op op, std::vector<Expr> args) {
    return std::make_shared<ExprNode>(ExprNode{op, {}, {}, std::move(args)});
}

inline Expr add(Expr a, Expr b) { return node(Op::Add, {std::move(a), std::move(b)}); }
inline Expr mul(Expr a, Expr b) { return node(Op::Mul, {std::move(a), std::move(b)}); }
inline Expr neg(Expr a) { return node(Op::Not, {std::move(a)}); }
inline Expr land(Expr a, Expr b) { return node(Op::And, {std::move(a), std::move(b)}); }
inline Expr lor(Expr a, Expr b) { return node(Op::Or, {std::move(a), std::move(b)}); }
inline Expr eq(Expr a, Expr b) { return node(Op::Eq, {std::move(a), std::move(b)}); }
inline Expr le(Expr a, Expr b) { return node(Op::Le, {std::move(a), std::move(b)}); }
inline Expr ite(Expr c, Expr t, Expr e) { return node(Op::If, {std::move(c), std::move(t), std::move(e)}); }

// Derived forms.
inline Expr sub(Expr a, Expr b) { return add(std::move(a), mul(cst(-1.0), std::move(b))); }
inline Expr lt(Expr a, Expr b) { return neg(le(std::move(b), std::move(a))); }
inline Expr gt(Expr a, Expr b) { return lt(std::move(b), std::move(a)); }
inline Expr ge(Expr a, Expr b) { return le(std::move(b), std::move(a)); }
inline Expr ne(Expr a, Expr b) { return neg(eq(std::move(a), std::move(b))); }

inline void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e->op == Op::Var) out.insert(e->name);
    for (auto& a : e->args) collect_vars(a, out);
}

inline std::string to_string(const Expr& e) {
    auto bin = [&](const char* s) { return "(" + to_string(e->args[0]) + " " + s + " " + to_string(e->args[1]) + ")"; };
    switch (e->op) {
    case Op::Var: return e->name;
    case Op::Const: return e->value.is_text() ? "'" + e->value.text() + "'" : e->value.str();
    case Op::Add: return bin("+");
    case Op::Mul: return bin("*");
    case Op::Not: return "not " + to_string(e->args[0]);
    case Op::And: return bin("and");
    case Op::Or: return bin("or");
    case Op::Eq: return bin("=");
    case Op::Le: return bin("<=");
    case Op::If:
        return "(if " + to_string(e->args[0]) + " then " + to_string(e->args[1]) + " else " +
               to_string(e->args[2]) + ")";
    }
    return "?";
}

struct UnboundVariable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using DetEnv = std::function<const Scalar&(const std::string&)>;
using RangeEnv = std::function<const RangeValue&(const std::string&)>;

inline DetEnv map_env(const std::map<std::string, Scalar>& m) {
    return [&m](const std::string& n) -> const Scalar& {
        auto it = m.find(n);
        if (it == m.end()) throw UnboundVariable("unbound variable: " + n);
        return it->second;
    };
}

inline RangeEnv map_env(const std::map<std::string, RangeValue>& m) {
    return [&m](const std::string& n) -> const RangeValue& {
        auto it = m.find(n);
        if (it == m.end()) throw UnboundVariable("unbound variable: " + n);
        return it->second;
    };
}

inline Scalar eval_det(const Expr& e, const DetEnv& env) {
    switch (e->op) {
    case Op::Var: return env(e->name);
    case Op::Const: return e->value;
    case Op::Add: return eval_det(e->args[0], env).real() + eval_det(e->args[1], env).real();
    case Op::Mul: {
        double a = eval_det(e->args[0], env).real(), b = eval_det(e->args[1], env).real();
        return a * b;
    }
    case Op::Not: return !eval_det(e->args[0], env).boolean();
    case Op::And: {
        bool a = eval_det(e->args[0], env).boolean();
        bool b = eval_det(e->args[1], env).boolean();
        return a && b;
    }
    case Op::Or: {
        bool a = eval_det(e->args[0], env).boolean();
        bool b = eval_det(e->args[1], env).boolean();
        return a || b;
    }
    case Op::Eq: return eval_det(e->args[0], env) == eval_det(e->args[1], env);
    case Op::Le: return eval_det(e->args[0], env) <= eval_det(e->args[1], env);
    case Op::If: {
        Scalar t = eval_det(e->args[1], env), f = eval_det(e->args[2], env);
        if (t.kind() != f.kind()) throw TypeError("if branches have different kinds");
        return eval_det(e->args[0], env).boolean() ? t : f;
    }
    }
    throw TypeError("bad expression");
}

inline RangeValue eval_range(const Expr& e, const RangeEnv& env) {
    switch (e->op) {
    case Op::Var: return env(e->name);
    case Op::Const: return RangeValue(e->value);
    case Op::Add: {
        RangeValue a = eval_range(e->args[0], env), b = eval_range(e->args[1], env);
        return RangeValue(a.lb.real() + b.lb.real(), a.sg.real() + b.sg.real(), a.ub.real() + b.ub.real());
    }
    case Op::Mul: {
        RangeValue a = eval_range(e->args[0], env), b = eval_range(e->args[1], env);
        double p[4] = {a.lb.real() * b.lb.real(), a.lb.real() * b.ub.real(), a.ub.real() * b.lb.real(),
                       a.ub.real() * b.ub.real()};
        double lo = p[0], hi = p[0];
        for (double x : p) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        double s = a.sg.real() * b.sg.real();
        return RangeValue(lo, std::clamp(s, lo, hi), hi);
    }
    case Op::Not: {
        RangeValue a = eval_range(e->args[0], env);
        return RangeValue(!a.ub.boolean(), !a.sg.boolean(), !a.lb.boolean());
    }
    case Op::And: {
        RangeValue a = eval_range(e->args[0], env), b = eval_range(e->args[1], env);
        return RangeValue(a.lb.boolean() && b.lb.boolean(), a.sg.boolean() && b.sg.boolean(),
                          a.ub.boolean() && b.ub.boolean());
    }
    case Op::Or: {
        RangeValue a = eval_range(e->args[0], env), b = eval_range(e->args[1], env);
        return RangeValue(a.lb.boolean() || b.lb.boolean(), a.sg.boolean() || b.sg.boolean(),
                          a.ub.boolean() || b.ub.boolean());
    }
    case Op::Eq: {
        RangeValue a = eval_range(e->args[0], env), b = eval_range(e->args[1], env);
        bool lo = a.ub == b.lb && b.ub == a.lb;
        return RangeValue(lo, a.sg == b.sg, overlaps(a, b));
    }
    case Op::Le: {
        RangeValue a = eval_range(e->args[0], env), b = eval_range(e->args[1], env);
        return RangeValue(a.ub <= b.lb, a.sg <= b.sg, a.lb <= b.ub);
    }
    case Op::If: {
        RangeValue c = eval_range(e->args[0], env);
        RangeValue t = eval_range(e->args[1], env), f = eval_range(e->args[2], env);
        if (t.kind() != f.kind()) throw TypeError("if branches have different kinds");
        const Scalar& sg = c.sg.boolean() ? t.sg : f.sg;
        if (c.lb.boolean()) return t;
        if (!c.ub.boolean()) return f;
        return range_hull(t, f, sg);
    }
    }
    throw TypeError("bad expression");
}

}  // namespace audb
