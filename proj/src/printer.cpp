#include "moo/printer.hpp"

#include <sstream>

namespace moo {

namespace {

constexpr int kPrecForall = 0;
constexpr int kPrecUnary = 7;
constexpr int kPrecPostfix = 8;

int precedence(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
    }
    return 0;
}

int precedence(const Expr& e) {
    if (auto* b = e.as<BinaryExpr>()) return precedence(b->op);
    if (e.as<UnaryExpr>()) return kPrecUnary;
    if (e.as<ForallExpr>()) return kPrecForall;
    if (auto* i = e.as<IntLit>(); i && i->value < 0) return kPrecUnary;
    return kPrecPostfix;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

std::string expr(const Expr& e);

std::string wrap_if(const Expr& e, bool parens) { return parens ? "(" + expr(e) + ")" : expr(e); }

std::string args(const std::vector<Expr>& as) {
    std::string out = "(";
    for (std::size_t i = 0; i < as.size(); ++i) {
        if (i) out += ", ";
        out += expr(as[i]);
    }
    return out + ")";
}

std::string type_args(const std::vector<TypeExpr>& ts) {
    if (ts.empty()) return "";
    std::string out = "<";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) out += ", ";
        out += render_type(ts[i]);
    }
    return out + ">";
}

std::string expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, StringLit>) {
                return quote(n.value);
            } else if constexpr (std::is_same_v<T, NullLit>) {
                return "null";
            } else if constexpr (std::is_same_v<T, ThisExpr>) {
                return "this";
            } else if constexpr (std::is_same_v<T, NameExpr>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return wrap_if(*n.object, precedence(*n.object) < kPrecPostfix) + "." + n.field;
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                std::string head;
                if (n.is_super) head = "super.";
                else if (n.receiver)
                    head = wrap_if(**n.receiver, precedence(**n.receiver) < kPrecPostfix) + ".";
                return head + n.method + args(n.args);
            } else if constexpr (std::is_same_v<T, NewExpr>) {
                return "new " + render_type(n.type) + args(n.args);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                int p = precedence(n.op);
                return wrap_if(*n.lhs, precedence(*n.lhs) < p) + " " + std::string(spelling(n.op)) + " " +
                       wrap_if(*n.rhs, precedence(*n.rhs) <= p);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                const Expr& o = *n.operand;
                bool parens = precedence(o) < kPrecUnary;
                // `-(5)` must not reparse as the literal -5
                if (n.op == UnaryOp::Neg && o.as<IntLit>()) parens = o.as<IntLit>()->value >= 0;
                return std::string(spelling(n.op)) + wrap_if(o, parens);
            } else if constexpr (std::is_same_v<T, IntrinsicExpr>) {
                return "@" + n.name + type_args(n.type_args) + args(n.args);
            } else {
                static_assert(std::is_same_v<T, ForallExpr>);
                return "forall (" + n.var + " = " + expr(*n.init) + "; " + expr(*n.cond) + "; " + n.var +
                       " = " + expr(*n.step) + ") : " + expr(*n.body);
            }
        },
        e.node);
}

class Writer {
public:
    void line(int depth, const std::string& text) {
        for (int i = 0; i < depth; ++i) out_ << "    ";
        out_ << text << '\n';
    }
    std::string str() const { return out_.str(); }

    void block(int depth, const Block& b) {
        for (const auto& s : b) stmt(depth, s);
    }

    void stmt(int depth, const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LocalDecl>) {
                    line(depth, render_type(n.type) + " " + n.name + (n.init ? " = " + expr(*n.init) : "") + ";");
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    line(depth, expr(n.target) + " = " + expr(n.value) + ";");
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    if_chain(depth, n, "if");
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    line(depth, "while (" + expr(n.cond) + ") {");
                    block(depth + 1, n.body);
                    line(depth, "}");
                } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                    line(depth, n.value ? "return " + expr(*n.value) + ";" : "return;");
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    line(depth, expr(n.expr) + ";");
                } else if constexpr (std::is_same_v<T, PrintStmt>) {
                    line(depth, "print(" + expr(n.value) + ");");
                } else {
                    static_assert(std::is_same_v<T, SuperCtorStmt>);
                    line(depth, "super" + args(n.args) + ";");
                }
            },
            s.node);
    }

    void if_chain(int depth, const IfStmt& s, const std::string& lead) {
        line(depth, lead + " (" + expr(s.cond) + ") {");
        block(depth + 1, s.then_branch);
        if (!s.else_branch) {
            line(depth, "}");
            return;
        }
        const Block& eb = *s.else_branch;
        if (eb.size() == 1 && eb.front().as<IfStmt>()) {
            if_chain(depth, *eb.front().as<IfStmt>(), "} else if");
            return;
        }
        line(depth, "} else {");
        block(depth + 1, eb);
        line(depth, "}");
    }

private:
    std::ostringstream out_;
};

std::string params(const std::vector<Param>& ps) {
    std::string out = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ", ";
        out += render_type(ps[i].type) + " " + ps[i].name;
    }
    return out + ")";
}

std::string type_params(const std::vector<std::string>& ps) {
    if (ps.empty()) return "";
    std::string out = "<";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ", ";
        out += ps[i];
    }
    return out + ">";
}

std::string signature(const MethodDecl& m) {
    std::string out;
    if (!m.type_params.empty()) out += type_params(m.type_params) + " ";
    out += m.return_type ? render_type(*m.return_type) : "void";
    return out + " " + m.name + params(m.params);
}

} // namespace

std::string render_type(const TypeExpr& t) { return t.name + type_args(t.args); }

std::string render_expr(const Expr& e) { return expr(e); }

std::string render_interface(const InterfaceDecl& i) {
    Writer w;
    std::string head = "interface " + i.name + type_params(i.type_params);
    if (!i.extends.empty()) {
        head += " extends ";
        for (std::size_t k = 0; k < i.extends.size(); ++k) {
            if (k) head += ", ";
            head += render_type(i.extends[k]);
        }
    }
    w.line(0, head + " {");
    for (const auto& m : i.methods) w.line(1, signature(m) + ";");
    w.line(0, "}");
    return w.str();
}

std::string render_class(const ClassDecl& c) {
    Writer w;
    std::string head = std::string(c.is_abstract ? "abstract " : "") + "class " + c.name + type_params(c.type_params);
    if (c.super_class) head += " extends " + render_type(*c.super_class);
    if (!c.interfaces.empty()) {
        head += " implements ";
        for (std::size_t k = 0; k < c.interfaces.size(); ++k) {
            if (k) head += ", ";
            head += render_type(c.interfaces[k]);
        }
    }
    w.line(0, head + " {");
    for (const auto& f : c.fields)
        w.line(1, std::string(spelling(f.visibility)) + " " + render_type(f.type) + " " + f.name + ";");
    if (c.constructor) {
        w.line(1, std::string(spelling(c.constructor->visibility)) + " " + c.name + params(c.constructor->params) + " {");
        w.block(2, c.constructor->body);
        w.line(1, "}");
    }
    for (const auto& m : c.methods) {
        std::string lead = std::string(spelling(m.visibility)) + (m.is_abstract ? " abstract " : " ");
        if (!m.body) {
            w.line(1, lead + signature(m) + ";");
            continue;
        }
        w.line(1, lead + signature(m) + " {");
        w.block(2, *m.body);
        w.line(1, "}");
    }
    w.line(0, "}");
    return w.str();
}

std::string render_driver(const DriverBlock& d) {
    Writer w;
    w.line(0, "driver {");
    w.block(1, d.body);
    w.line(0, "}");
    return w.str();
}

std::string render_source(const SourceUnit& unit) {
    std::string out;
    auto append = [&](const std::string& piece) {
        if (!out.empty()) out += "\n";
        out += piece;
    };
    for (const auto& i : unit.interfaces) append(render_interface(i));
    for (const auto& c : unit.classes) append(render_class(c));
    if (unit.driver) append(render_driver(*unit.driver));
    return out;
}

} // namespace moo
