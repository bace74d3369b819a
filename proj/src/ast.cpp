#include "moo/ast.hpp"

#include <algorithm>
#include <array>

namespace moo {

bool TypeExpr::is_primitive() const {
    return kind == Kind::Named && args.empty() &&
           (name == "int" || name == "bool" || name == "string");
}

std::string to_string(const TypeExpr& t) {
    std::string out = t.name;
    if (!t.args.empty()) {
        out += "<";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) out += ", ";
            out += to_string(t.args[i]);
        }
        out += ">";
    }
    return out;
}

std::string_view spelling(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    }
    return "?";
}

std::string_view spelling(UnaryOp op) { return op == UnaryOp::Not ? "!" : "-"; }

std::string_view spelling(Visibility v) {
    switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Private: return "private";
    }
    return "public";
}

bool intrinsic::is_known(std::string_view name) {
    static constexpr std::array names{field, singleton, violation, check_event, evaluating};
    return std::find(names.begin(), names.end(), name) != names.end();
}

namespace build {
Expr int_lit(std::int64_t v) { return Expr{IntLit{v}, {}}; }
Expr bool_lit(bool v) { return Expr{BoolLit{v}, {}}; }
Expr string_lit(std::string v) { return Expr{StringLit{std::move(v)}, {}}; }
Expr null_lit() { return Expr{NullLit{}, {}}; }
Expr this_expr() { return Expr{ThisExpr{}, {}}; }
Expr name(std::string n) { return Expr{NameExpr{std::move(n)}, {}}; }
Expr field(Expr object, std::string f) {
    return Expr{FieldAccess{Box<Expr>(std::move(object)), std::move(f)}, {}};
}
Expr call(std::optional<Expr> receiver, std::string method, std::vector<Expr> args) {
    CallExpr c;
    if (receiver) c.receiver = Box<Expr>(std::move(*receiver));
    c.method = std::move(method);
    c.args = std::move(args);
    return Expr{std::move(c), {}};
}
Expr super_call(std::string method, std::vector<Expr> args) {
    CallExpr c;
    c.is_super = true;
    c.method = std::move(method);
    c.args = std::move(args);
    return Expr{std::move(c), {}};
}
Expr new_object(TypeExpr t, std::vector<Expr> args) {
    return Expr{NewExpr{std::move(t), std::move(args)}, {}};
}
Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr{BinaryExpr{op, Box<Expr>(std::move(lhs)), Box<Expr>(std::move(rhs))}, {}};
}
Expr unary(UnaryOp op, Expr operand) { return Expr{UnaryExpr{op, Box<Expr>(std::move(operand))}, {}}; }
Expr intrinsic(std::string name, std::vector<TypeExpr> type_args, std::vector<Expr> args) {
    return Expr{IntrinsicExpr{std::move(name), std::move(type_args), std::move(args)}, {}};
}
} // namespace build

const FieldDecl* ClassDecl::find_field(std::string_view n) const {
    for (const auto& f : fields)
        if (f.name == n) return &f;
    return nullptr;
}

const MethodDecl* ClassDecl::find_method(std::string_view n) const {
    for (const auto& m : methods)
        if (m.name == n) return &m;
    return nullptr;
}

namespace {
TypeExpr applied(const std::string& name, const std::vector<std::string>& params) {
    std::vector<TypeExpr> args;
    args.reserve(params.size());
    for (const auto& p : params) args.push_back(TypeExpr::var(p));
    return TypeExpr::named(name, std::move(args));
}
} // namespace

TypeExpr ClassDecl::self_type() const { return applied(name, type_params); }

const MethodDecl* InterfaceDecl::find_method(std::string_view n) const {
    for (const auto& m : methods)
        if (m.name == n) return &m;
    return nullptr;
}

TypeExpr InterfaceDecl::self_type() const { return applied(name, type_params); }

const ClassDecl* SourceUnit::find_class(std::string_view n) const {
    for (const auto& c : classes)
        if (c.name == n) return &c;
    return nullptr;
}

const InterfaceDecl* SourceUnit::find_interface(std::string_view n) const {
    for (const auto& i : interfaces)
        if (i.name == n) return &i;
    return nullptr;
}

const ClassDecl* SourceUnit::super_of(const ClassDecl& c) const {
    if (!c.super_class) return nullptr;
    return find_class(c.super_class->name);
}

SourceUnit merge_units(SourceUnit a, SourceUnit b) {
    for (auto& c : b.classes) a.classes.push_back(std::move(c));
    for (auto& i : b.interfaces) a.interfaces.push_back(std::move(i));
    if (!a.driver) a.driver = std::move(b.driver);
    return a;
}

} // namespace moo
