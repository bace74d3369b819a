#include "moo/typecheck.hpp"

#include "moo/parser.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace moo {

// ---------------------------------------------------------------------------
// ClassTable
// ---------------------------------------------------------------------------

ClassTable::ClassTable(const SourceUnit& unit) : unit_(&unit) {
    for (const auto& c : unit.classes) classes_.emplace(c.name, &c);
    for (const auto& i : unit.interfaces) interfaces_.emplace(i.name, &i);
}

const ClassDecl* ClassTable::find_class(std::string_view name) const {
    auto it = classes_.find(name);
    return it == classes_.end() ? nullptr : it->second;
}

const InterfaceDecl* ClassTable::find_interface(std::string_view name) const {
    auto it = interfaces_.find(name);
    return it == interfaces_.end() ? nullptr : it->second;
}

std::optional<std::vector<std::string>> ClassTable::params_of(std::string_view name) const {
    if (auto* c = find_class(name)) return c->type_params;
    if (auto* i = find_interface(name)) return i->type_params;
    return std::nullopt;
}

namespace {
std::optional<TypeSubstitution> subst_for(const std::vector<std::string>& params, const TypeExpr& t) {
    if (params.size() != t.args.size()) return std::nullopt;
    return TypeSubstitution::from_lists(params, t.args);
}
} // namespace

std::vector<TypeExpr> ClassTable::direct_supertypes(const TypeExpr& t) const {
    std::vector<TypeExpr> out;
    if (t.is_var()) return out;
    if (auto* c = find_class(t.name)) {
        auto s = subst_for(c->type_params, t);
        if (!s) return out;
        if (c->super_class) out.push_back(substitute(*s, *c->super_class));
        for (const auto& i : c->interfaces) out.push_back(substitute(*s, i));
    } else if (auto* i = find_interface(t.name)) {
        auto s = subst_for(i->type_params, t);
        if (!s) return out;
        for (const auto& e : i->extends) out.push_back(substitute(*s, e));
    }
    return out;
}

std::optional<TypeExpr> ClassTable::superclass_of(const TypeExpr& t) const {
    if (t.is_var()) return std::nullopt;
    const ClassDecl* c = find_class(t.name);
    if (!c || !c->super_class) return std::nullopt;
    auto s = subst_for(c->type_params, t);
    if (!s) return std::nullopt;
    return substitute(*s, *c->super_class);
}

std::optional<TypeExpr> ClassTable::as_supertype(const TypeExpr& t, std::string_view target) const {
    if (t.is_var()) return std::nullopt;
    std::deque<TypeExpr> work{t};
    std::set<std::string> seen;
    while (!work.empty()) {
        TypeExpr cur = std::move(work.front());
        work.pop_front();
        if (cur.name == target) return cur;
        if (!seen.insert(cur.name).second) continue;
        for (auto& s : direct_supertypes(cur)) work.push_back(std::move(s));
    }
    return std::nullopt;
}

bool ClassTable::is_subtype(const TypeExpr& sub, const TypeExpr& super) const {
    if (sub == super) return true;
    if (sub.is_var() || super.is_var()) return false;
    auto up = as_supertype(sub, super.name);
    return up && *up == super;
}

bool ClassTable::is_reference(const TypeExpr& t) const {
    if (t.is_var()) return true;
    if (t.is_named("string") || t.is_named(builtin_type::null_name)) return true;
    return find_class(t.name) || find_interface(t.name);
}

bool ClassTable::assignable(const TypeExpr& from, const TypeExpr& to) const {
    if (from.is_named(builtin_type::null_name))
        return is_reference(to) && !to.is_named(builtin_type::null_name);
    return is_subtype(from, to);
}

bool ClassTable::is_subclass(std::string_view sub, std::string_view ancestor) const {
    const ClassDecl* c = find_class(sub);
    std::set<std::string_view> seen;
    while (c && seen.insert(c->name).second) {
        if (c->name == ancestor) return true;
        c = c->super_class ? find_class(c->super_class->name) : nullptr;
    }
    return false;
}

std::vector<const ClassDecl*> ClassTable::class_chain(const ClassDecl& c) const {
    std::vector<const ClassDecl*> out;
    const ClassDecl* cur = &c;
    std::set<std::string_view> seen;
    while (cur && seen.insert(cur->name).second) {
        out.push_back(cur);
        cur = cur->super_class ? find_class(cur->super_class->name) : nullptr;
    }
    return out;
}

std::optional<ClassTable::FieldRef> ClassTable::find_field(const TypeExpr& receiver, std::string_view name) const {
    std::optional<TypeExpr> cur = receiver;
    std::set<std::string> seen;
    while (cur && !cur->is_var()) {
        const ClassDecl* c = find_class(cur->name);
        if (!c || !seen.insert(c->name).second) return std::nullopt;
        auto s = subst_for(c->type_params, *cur);
        if (!s) return std::nullopt;
        if (const FieldDecl* f = c->find_field(name)) return FieldRef{c, f, substitute(*s, f->type)};
        cur = superclass_of(*cur);
    }
    return std::nullopt;
}

std::optional<ClassTable::MethodRef> ClassTable::find_method(const TypeExpr& receiver, std::string_view name) const {
    if (receiver.is_var()) return std::nullopt;
    // class chain first so that overriding bodies win over interface signatures
    std::optional<TypeExpr> cur = receiver;
    std::set<std::string> seen;
    while (cur && find_class(cur->name)) {
        const ClassDecl* c = find_class(cur->name);
        if (!seen.insert(c->name).second) break;
        auto s = subst_for(c->type_params, *cur);
        if (!s) return std::nullopt;
        if (const MethodDecl* m = c->find_method(name)) return MethodRef{c->name, false, m, *s};
        cur = superclass_of(*cur);
    }
    std::deque<TypeExpr> work{receiver};
    seen.clear();
    while (!work.empty()) {
        TypeExpr t = std::move(work.front());
        work.pop_front();
        if (!seen.insert(t.name).second) continue;
        if (const InterfaceDecl* i = find_interface(t.name)) {
            auto s = subst_for(i->type_params, t);
            if (!s) continue;
            if (const MethodDecl* m = i->find_method(name)) return MethodRef{i->name, true, m, *s};
        }
        for (auto& st : direct_supertypes(t)) work.push_back(std::move(st));
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// TypeChecker
// ---------------------------------------------------------------------------

const TypeExpr* TypeContext::lookup_local(const std::string& name) const {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto f = it->find(name);
        if (f != it->end()) return &f->second;
    }
    return nullptr;
}

namespace {

void report(Diagnostics& out, std::string code, std::string msg, SourcePos pos) {
    out.push_back(Diagnostic{std::move(code), std::move(msg), pos});
}

std::string show(const TypeExpr& t) { return "'" + to_string(t) + "'"; }

int rank(Visibility v) {
    switch (v) {
    case Visibility::Public: return 2;
    case Visibility::Protected: return 1;
    case Visibility::Private: return 0;
    }
    return 0;
}

struct Signature {
    std::vector<TypeExpr> params;
    std::optional<TypeExpr> ret;
    std::size_t type_param_count = 0;
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Signature of `m` seen through `owner_subst`, with the method's own type
/// parameters renamed positionally so signatures compare up to alpha.
Signature signature_of(const MethodDecl& m, const TypeSubstitution& owner_subst) {
    TypeSubstitution s;
    for (std::size_t i = 0; i < m.type_params.size(); ++i)
        s.bind(m.type_params[i], TypeExpr::var("#m" + std::to_string(i)));
    for (const auto& [v, t] : owner_subst.bindings())
        if (!s.lookup(v)) s.bind(v, t);
    Signature sig;
    sig.type_param_count = m.type_params.size();
    for (const auto& p : m.params) sig.params.push_back(substitute(s, p.type));
    if (m.return_type) sig.ret = substitute(s, *m.return_type);
    return sig;
}

bool definitely_returns(const Block& b) {
    if (b.empty()) return false;
    const Stmt& last = b.back();
    if (last.as<ReturnStmt>()) return true;
    if (auto* i = last.as<IfStmt>())
        return i->else_branch && definitely_returns(i->then_branch) && definitely_returns(*i->else_branch);
    return false;
}

} // namespace

TypeChecker::TypeChecker(const SourceUnit& unit) : table_(unit) {}

Diagnostics typecheck_program(const SourceUnit& unit) { return TypeChecker(unit).check_program(); }

bool TypeChecker::check_type(const TypeExpr& t, const std::vector<std::string>& type_vars, SourcePos pos,
                             Diagnostics& out) const {
    if (t.is_var()) {
        if (std::find(type_vars.begin(), type_vars.end(), t.name) != type_vars.end()) return true;
        report(out, "unknown-name", "type variable '" + t.name + "' is not in scope", pos);
        return false;
    }
    if (t.is_primitive()) return true;
    if (t.name == "int" || t.name == "bool" || t.name == "string") {
        report(out, "arity", "primitive type '" + t.name + "' takes no type arguments", pos);
        return false;
    }
    // a bare name that is a type variable parses as Named when out of scope
    auto params = table_.params_of(t.name);
    if (!params) {
        report(out, "unknown-name", "unknown type '" + t.name + "'", pos);
        return false;
    }
    if (params->size() != t.args.size()) {
        report(out, "arity",
               "type '" + t.name + "' expects " + std::to_string(params->size()) + " type argument(s), got " +
                   std::to_string(t.args.size()),
               pos);
        return false;
    }
    bool ok = true;
    for (const auto& a : t.args) ok = check_type(a, type_vars, pos, out) && ok;
    return ok;
}

bool TypeChecker::visible(Visibility v, const std::string& owner, const TypeContext& ctx) const {
    if (ctx.ignore_visibility || v == Visibility::Public) return true;
    if (!ctx.cls) return false;
    if (v == Visibility::Private) return ctx.cls->name == owner;
    return table_.is_subclass(ctx.cls->name, owner);
}

Diagnostics TypeChecker::check_program() {
    Diagnostics out = check_structure(table_.unit());
    if (has_errors(out)) return out;
    for (const auto& i : table_.unit().interfaces) check_interface(i, out);
    for (const auto& c : table_.unit().classes) check_class(c, out);
    if (const auto& d = table_.unit().driver) {
        TypeContext ctx;
        check_block(d->body, ctx, out);
    }
    return out;
}

void TypeChecker::check_interface(const InterfaceDecl& i, Diagnostics& out) const {
    for (const auto& e : i.extends) {
        if (!check_type(e, i.type_params, i.pos, out)) continue;
        if (!table_.find_interface(e.name))
            report(out, "type-mismatch", "interface '" + i.name + "' can only extend interfaces, not '" + e.name + "'",
                   i.pos);
    }
    for (const auto& m : i.methods) {
        std::vector<std::string> vars = i.type_params;
        vars.insert(vars.end(), m.type_params.begin(), m.type_params.end());
        for (const auto& p : m.params) check_type(p.type, vars, m.pos, out);
        if (m.return_type) check_type(*m.return_type, vars, m.pos, out);
    }
}

void TypeChecker::check_class(const ClassDecl& c, Diagnostics& out) const {
    const auto& vars = c.type_params;
    std::optional<TypeExpr> super;
    if (c.super_class && check_type(*c.super_class, vars, c.pos, out)) {
        if (!table_.find_class(c.super_class->name))
            report(out, "type-mismatch", "class '" + c.name + "' can only extend a class, not '" + c.super_class->name + "'",
                   c.pos);
        else
            super = c.super_class;
    }
    for (const auto& i : c.interfaces) {
        if (check_type(i, vars, c.pos, out) && !table_.find_interface(i.name))
            report(out, "type-mismatch", "'" + i.name + "' is not an interface", c.pos);
    }
    for (const auto& f : c.fields) {
        check_type(f.type, vars, f.pos, out);
    }

    // constructor
    if (c.constructor) {
        const auto& k = *c.constructor;
        TypeContext ctx;
        ctx.cls = &c;
        ctx.type_vars = vars;
        ctx.in_method = true;
        for (const auto& p : k.params) {
            check_type(p.type, vars, k.pos, out);
            if (ctx.lookup_local(p.name))
                report(out, "redeclaration", "parameter '" + p.name + "' declared twice", k.pos);
            ctx.declare(p.name, p.type);
        }
        bool explicit_super = !k.body.empty() && k.body.front().as<SuperCtorStmt>();
        if (!explicit_super && super) {
            const ClassDecl* sc = table_.find_class(super->name);
            if (sc && sc->constructor && !sc->constructor->params.empty())
                report(out, "arity",
                       "constructor of '" + c.name + "' must call super(...) with " +
                           std::to_string(sc->constructor->params.size()) + " argument(s)",
                       k.pos);
        }
        check_block(k.body, ctx, out);
    } else if (super) {
        const ClassDecl* sc = table_.find_class(super->name);
        if (sc && sc->constructor && !sc->constructor->params.empty())
            report(out, "arity",
                   "class '" + c.name + "' needs a constructor: superclass '" + sc->name +
                       "' has no zero-argument constructor",
                   c.pos);
    }

    // methods
    for (const auto& m : c.methods) {
        TypeContext ctx;
        ctx.cls = &c;
        ctx.type_vars = vars;
        ctx.type_vars.insert(ctx.type_vars.end(), m.type_params.begin(), m.type_params.end());
        ctx.in_method = true;
        bool sig_ok = true;
        for (const auto& p : m.params) {
            sig_ok = check_type(p.type, ctx.type_vars, m.pos, out) && sig_ok;
            if (ctx.lookup_local(p.name))
                report(out, "redeclaration", "parameter '" + p.name + "' declared twice", m.pos);
            ctx.declare(p.name, p.type);
        }
        if (m.return_type) sig_ok = check_type(*m.return_type, ctx.type_vars, m.pos, out) && sig_ok;
        ctx.return_type = m.return_type;

        // overriding
        if (super && sig_ok) {
            if (auto inherited = table_.find_method(*super, m.name)) {
                const MethodDecl& base = *inherited->decl;
                if (base.visibility == Visibility::Private && !inherited->owner_is_interface) {
                    report(out, "bad-override",
                           "method '" + m.name + "' redefines private method of '" + inherited->owner + "'", m.pos);
                } else {
                    if (signature_of(base, inherited->owner_subst) != signature_of(m, TypeSubstitution{}))
                        report(out, "bad-override",
                               "method '" + m.name + "' does not match the signature it overrides in '" +
                                   inherited->owner + "'",
                               m.pos);
                    if (rank(m.visibility) < rank(base.visibility))
                        report(out, "bad-override",
                               "method '" + m.name + "' reduces the visibility of '" + inherited->owner + "." +
                                   m.name + "'",
                               m.pos);
                }
            }
        }

        if (m.body) {
            check_block(*m.body, ctx, out);
            if (m.return_type && !definitely_returns(*m.body))
                report(out, "missing-return", "method '" + m.name + "' may finish without returning a value", m.pos);
        }
    }

    if (!c.is_abstract) check_implementations(c, out);
}

void TypeChecker::check_implementations(const ClassDecl& c, Diagnostics& out) const {
    TypeExpr self = c.self_type();
    // required signatures: abstract class methods along the chain, then all
    // interface methods reachable from the class
    struct Required {
        std::string owner;
        const MethodDecl* decl;
        TypeSubstitution subst;
    };
    std::vector<Required> required;
    std::set<std::string> seen;
    std::deque<TypeExpr> work{self};
    while (!work.empty()) {
        TypeExpr t = std::move(work.front());
        work.pop_front();
        if (!seen.insert(t.name).second) continue;
        if (const ClassDecl* k = table_.find_class(t.name)) {
            if (k->type_params.size() != t.args.size()) continue;
            auto s = TypeSubstitution::from_lists(k->type_params, t.args);
            for (const auto& m : k->methods)
                if (m.is_abstract) required.push_back({k->name, &m, s});
        } else if (const InterfaceDecl* i = table_.find_interface(t.name)) {
            if (i->type_params.size() != t.args.size()) continue;
            auto s = TypeSubstitution::from_lists(i->type_params, t.args);
            for (const auto& m : i->methods) required.push_back({i->name, &m, s});
        }
        for (auto& st : table_.direct_supertypes(t)) work.push_back(std::move(st));
    }

    std::set<std::string> reported;
    for (const auto& r : required) {
        auto impl = table_.find_method(self, r.decl->name);
        if (!impl || impl->owner_is_interface || !impl->decl->body) {
            if (reported.insert(r.decl->name).second)
                report(out, "missing-implementation",
                       "class '" + c.name + "' does not implement '" + r.owner + "." + r.decl->name + "'", c.pos);
            continue;
        }
        if (signature_of(*impl->decl, impl->owner_subst) != signature_of(*r.decl, r.subst)) {
            if (reported.insert(r.decl->name).second)
                report(out, "bad-override",
                       "'" + impl->owner + "." + r.decl->name + "' does not match the signature required by '" +
                           r.owner + "'",
                       impl->decl->pos);
        } else if (impl->decl->visibility != Visibility::Public && table_.find_interface(r.owner)) {
            if (reported.insert(r.decl->name).second)
                report(out, "bad-override",
                       "'" + impl->owner + "." + r.decl->name + "' implements an interface method and must be public",
                       impl->decl->pos);
        }
    }
}

void TypeChecker::check_block(const Block& b, TypeContext& ctx, Diagnostics& out) const {
    ctx.scopes.emplace_back();
    for (const auto& s : b) check_stmt(s, ctx, out);
    ctx.scopes.pop_back();
}

void TypeChecker::check_stmt(const Stmt& s, TypeContext& ctx, Diagnostics& out) const {
    auto expect_bool = [&](const Expr& e, const char* what) {
        auto t = type_of(e, ctx, out);
        if (t && !t->is_named("bool"))
            report(out, "type-mismatch", std::string(what) + " must be 'bool', found " + show(*t), e.pos);
    };

    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LocalDecl>) {
                bool ok = check_type(n.type, ctx.type_vars, s.pos, out);
                if (ctx.lookup_local(n.name))
                    report(out, "redeclaration", "variable '" + n.name + "' is already declared", s.pos);
                if (n.init) {
                    auto t = type_of(*n.init, ctx, out);
                    if (t && ok && !table_.assignable(*t, n.type))
                        report(out, "type-mismatch",
                               "cannot initialize " + show(n.type) + " variable '" + n.name + "' with " + show(*t),
                               s.pos);
                }
                ctx.declare(n.name, n.type);
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                auto target = type_of(n.target, ctx, out);
                auto value = type_of(n.value, ctx, out);
                if (target && value && !table_.assignable(*value, *target))
                    report(out, "type-mismatch", "cannot assign " + show(*value) + " to " + show(*target), s.pos);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                expect_bool(n.cond, "if condition");
                check_block(n.then_branch, ctx, out);
                if (n.else_branch) check_block(*n.else_branch, ctx, out);
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                expect_bool(n.cond, "while condition");
                check_block(n.body, ctx, out);
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                if (!ctx.return_type) {
                    if (n.value) report(out, "type-mismatch", "cannot return a value here", s.pos);
                    return;
                }
                if (!n.value) {
                    report(out, "type-mismatch", "missing return value of type " + show(*ctx.return_type), s.pos);
                    return;
                }
                auto t = type_of(*n.value, ctx, out);
                if (t && !table_.assignable(*t, *ctx.return_type))
                    report(out, "type-mismatch",
                           "returning " + show(*t) + " from a method declared to return " + show(*ctx.return_type),
                           s.pos);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                type_of(n.expr, ctx, out);
            } else if constexpr (std::is_same_v<T, PrintStmt>) {
                auto t = type_of(n.value, ctx, out);
                if (t && t->is_named(builtin_type::void_name))
                    report(out, "void-value", "cannot print a void expression", s.pos);
            } else {
                static_assert(std::is_same_v<T, SuperCtorStmt>);
                const ClassDecl* c = ctx.cls;
                if (!c || !c->super_class) {
                    report(out, "invalid-super", "super(...) requires a superclass", s.pos);
                    return;
                }
                const ClassDecl* sc = table_.find_class(c->super_class->name);
                if (!sc) return;
                std::vector<Param> params = sc->constructor ? sc->constructor->params : std::vector<Param>{};
                if (sc->constructor && !visible(sc->constructor->visibility, sc->name, ctx))
                    report(out, "visibility-violation", "constructor of '" + sc->name + "' is not accessible", s.pos);
                auto subst = sc->type_params.size() == c->super_class->args.size()
                                 ? TypeSubstitution::from_lists(sc->type_params, c->super_class->args)
                                 : TypeSubstitution{};
                check_args(params, subst, n.args, "super constructor of '" + sc->name + "'", s.pos, ctx, out);
            }
        },
        s.node);
}

bool TypeChecker::check_args(const std::vector<Param>& params, const TypeSubstitution& subst,
                             const std::vector<Expr>& args, const std::string& what, SourcePos pos,
                             TypeContext& ctx, Diagnostics& out) const {
    bool ok = true;
    if (params.size() != args.size()) {
        report(out, "arity",
               what + " expects " + std::to_string(params.size()) + " argument(s), got " + std::to_string(args.size()),
               pos);
        ok = false;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        auto t = type_of(args[i], ctx, out);
        if (!t) {
            ok = false;
            continue;
        }
        if (i >= params.size()) continue;
        TypeExpr want = substitute(subst, params[i].type);
        if (!table_.assignable(*t, want)) {
            report(out, "type-mismatch",
                   "argument " + std::to_string(i + 1) + " of " + what + ": expected " + show(want) + ", found " +
                       show(*t),
                   args[i].pos);
            ok = false;
        }
    }
    return ok;
}

std::optional<TypeExpr> TypeChecker::type_of(const Expr& e, TypeContext& ctx, Diagnostics& out) const {
    return std::visit(
        [&](const auto& n) -> std::optional<TypeExpr> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return TypeExpr::int_type();
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return TypeExpr::bool_type();
            } else if constexpr (std::is_same_v<T, StringLit>) {
                return TypeExpr::string_type();
            } else if constexpr (std::is_same_v<T, NullLit>) {
                return builtin_type::null_type();
            } else if constexpr (std::is_same_v<T, ThisExpr>) {
                if (!ctx.cls || !ctx.in_method) {
                    report(out, "invalid-this", "'this' is not available here", e.pos);
                    return std::nullopt;
                }
                return ctx.cls->self_type();
            } else if constexpr (std::is_same_v<T, NameExpr>) {
                if (const TypeExpr* t = ctx.lookup_local(n.name)) return *t;
                if (ctx.cls) {
                    if (auto f = table_.find_field(ctx.cls->self_type(), n.name)) {
                        if (!visible(f->decl->visibility, f->owner->name, ctx)) {
                            report(out, "visibility-violation",
                                   "field '" + n.name + "' is " + std::string(spelling(f->decl->visibility)) + " in '" +
                                       f->owner->name + "'",
                                   e.pos);
                            return std::nullopt;
                        }
                        return f->type;
                    }
                }
                report(out, "unknown-name", "unknown name '" + n.name + "'", e.pos);
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return type_field(n, e.pos, ctx, out);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                return type_call(n, e.pos, ctx, out);
            } else if constexpr (std::is_same_v<T, NewExpr>) {
                if (!check_type(n.type, ctx.type_vars, e.pos, out)) return std::nullopt;
                const ClassDecl* c = table_.find_class(n.type.name);
                if (!c) {
                    report(out, "abstract-instantiation", "cannot instantiate " + show(n.type), e.pos);
                    for (const auto& a : n.args) type_of(a, ctx, out);
                    return std::nullopt;
                }
                if (c->is_abstract) {
                    report(out, "abstract-instantiation", "cannot instantiate abstract class '" + c->name + "'", e.pos);
                    for (const auto& a : n.args) type_of(a, ctx, out);
                    return std::nullopt;
                }
                std::vector<Param> params = c->constructor ? c->constructor->params : std::vector<Param>{};
                if (c->constructor && !visible(c->constructor->visibility, c->name, ctx))
                    report(out, "visibility-violation", "constructor of '" + c->name + "' is not accessible", e.pos);
                auto subst = TypeSubstitution::from_lists(c->type_params, n.type.args);
                check_args(params, subst, n.args, "constructor of '" + c->name + "'", e.pos, ctx, out);
                return n.type;
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                auto l = type_of(*n.lhs, ctx, out);
                auto r = type_of(*n.rhs, ctx, out);
                if (!l || !r) return std::nullopt;
                auto mismatch = [&]() -> std::optional<TypeExpr> {
                    report(out, "type-mismatch",
                           "operator '" + std::string(spelling(n.op)) + "' cannot be applied to " + show(*l) + " and " +
                               show(*r),
                           e.pos);
                    return std::nullopt;
                };
                const bool void_operand =
                    l->is_named(builtin_type::void_name) || r->is_named(builtin_type::void_name);
                switch (n.op) {
                case BinaryOp::Add:
                    if (void_operand) return mismatch();
                    if (l->is_named("string") || r->is_named("string")) return TypeExpr::string_type();
                    if (l->is_named("int") && r->is_named("int")) return TypeExpr::int_type();
                    return mismatch();
                case BinaryOp::Sub:
                case BinaryOp::Mul:
                case BinaryOp::Div:
                case BinaryOp::Mod:
                    if (l->is_named("int") && r->is_named("int")) return TypeExpr::int_type();
                    return mismatch();
                case BinaryOp::Lt:
                case BinaryOp::Le:
                case BinaryOp::Gt:
                case BinaryOp::Ge:
                    if (l->is_named("int") && r->is_named("int")) return TypeExpr::bool_type();
                    return mismatch();
                case BinaryOp::And:
                case BinaryOp::Or:
                    if (l->is_named("bool") && r->is_named("bool")) return TypeExpr::bool_type();
                    return mismatch();
                case BinaryOp::Eq:
                case BinaryOp::Ne:
                    if (void_operand) return mismatch();
                    if (table_.assignable(*l, *r) || table_.assignable(*r, *l)) return TypeExpr::bool_type();
                    if (*l == builtin_type::null_type() && *r == builtin_type::null_type()) return TypeExpr::bool_type();
                    return mismatch();
                }
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                auto t = type_of(*n.operand, ctx, out);
                if (!t) return std::nullopt;
                const char* want = n.op == UnaryOp::Not ? "bool" : "int";
                if (!t->is_named(want)) {
                    report(out, "type-mismatch",
                           "operator '" + std::string(spelling(n.op)) + "' expects '" + want + "', found " + show(*t),
                           e.pos);
                    return std::nullopt;
                }
                return *t;
            } else if constexpr (std::is_same_v<T, IntrinsicExpr>) {
                return type_intrinsic(n, e.pos, ctx, out);
            } else {
                static_assert(std::is_same_v<T, ForallExpr>);
                return type_forall(n, e.pos, ctx, out);
            }
        },
        e.node);
}

std::optional<TypeExpr> TypeChecker::type_field(const FieldAccess& f, SourcePos pos, TypeContext& ctx,
                                                Diagnostics& out) const {
    auto recv = type_of(*f.object, ctx, out);
    if (!recv) return std::nullopt;
    auto field = table_.find_field(*recv, f.field);
    if (!field) {
        report(out, "unknown-field", "type " + show(*recv) + " has no field '" + f.field + "'", pos);
        return std::nullopt;
    }
    if (!visible(field->decl->visibility, field->owner->name, ctx)) {
        report(out, "visibility-violation",
               "field '" + f.field + "' is " + std::string(spelling(field->decl->visibility)) + " in '" +
                   field->owner->name + "'",
               pos);
        return std::nullopt;
    }
    return field->type;
}

namespace {
// Binds method type parameters by matching a declared parameter type against
// an argument type. Mismatches are left for the assignability check.
void unify(const TypeExpr& param, const TypeExpr& arg, const std::vector<std::string>& vars,
           const ClassTable& table, TypeSubstitution& bound, bool& conflict) {
    if (arg.is_named(builtin_type::null_name)) return;
    if (param.is_var()) {
        if (std::find(vars.begin(), vars.end(), param.name) == vars.end()) return;
        if (const TypeExpr* prev = bound.lookup(param.name)) {
            if (!(*prev == arg)) conflict = true;
            return;
        }
        bound.bind(param.name, arg);
        return;
    }
    auto up = table.as_supertype(arg, param.name);
    if (!up || up->args.size() != param.args.size()) return;
    for (std::size_t i = 0; i < param.args.size(); ++i) unify(param.args[i], up->args[i], vars, table, bound, conflict);
}
} // namespace

std::optional<TypeExpr> TypeChecker::type_call(const CallExpr& c, SourcePos pos, TypeContext& ctx,
                                               Diagnostics& out) const {
    std::optional<TypeExpr> recv;
    if (c.is_super) {
        if (!ctx.cls || !ctx.in_method || !ctx.cls->super_class) {
            report(out, "invalid-super", "'super." + c.method + "' requires an enclosing subclass", pos);
            for (const auto& a : c.args) type_of(a, ctx, out);
            return std::nullopt;
        }
        recv = *ctx.cls->super_class;
    } else if (c.receiver) {
        recv = type_of(**c.receiver, ctx, out);
    } else {
        if (!ctx.cls || !ctx.in_method) {
            report(out, "unknown-name", "unknown function '" + c.method + "'", pos);
            for (const auto& a : c.args) type_of(a, ctx, out);
            return std::nullopt;
        }
        recv = ctx.cls->self_type();
    }
    if (!recv) {
        for (const auto& a : c.args) type_of(a, ctx, out);
        return std::nullopt;
    }

    auto m = table_.find_method(*recv, c.method);
    if (!m) {
        if (c.method == "equals" && !recv->is_named(builtin_type::null_name) &&
            !recv->is_named(builtin_type::void_name)) {
            // built-in value equality, available on every type
            if (c.args.size() != 1) {
                report(out, "arity", "'equals' expects 1 argument", pos);
                return std::nullopt;
            }
            auto a = type_of(c.args[0], ctx, out);
            if (a && a->is_named(builtin_type::void_name)) {
                report(out, "void-value", "cannot compare a void expression", pos);
                return std::nullopt;
            }
            return TypeExpr::bool_type();
        }
        report(out, "unknown-method", "type " + show(*recv) + " has no method '" + c.method + "'", pos);
        for (const auto& a : c.args) type_of(a, ctx, out);
        return std::nullopt;
    }
    const MethodDecl& decl = *m->decl;
    if (!visible(decl.visibility, m->owner, ctx)) {
        report(out, "visibility-violation",
               "method '" + c.method + "' is " + std::string(spelling(decl.visibility)) + " in '" + m->owner + "'", pos);
        return std::nullopt;
    }
    if (c.is_super && !decl.body) {
        report(out, "invalid-super", "'super." + c.method + "' refers to an abstract method", pos);
        return std::nullopt;
    }

    // infer method type parameters from the argument types
    std::vector<std::optional<TypeExpr>> arg_types;
    for (const auto& a : c.args) arg_types.push_back(type_of(a, ctx, out));
    if (std::any_of(arg_types.begin(), arg_types.end(), [](const auto& t) { return !t; })) return std::nullopt;
    if (decl.params.size() != c.args.size()) {
        report(out, "arity",
               "method '" + c.method + "' expects " + std::to_string(decl.params.size()) + " argument(s), got " +
                   std::to_string(c.args.size()),
               pos);
        return std::nullopt;
    }
    TypeSubstitution inferred;
    bool conflict = false;
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        TypeSubstitution partial;
        for (const auto& [v, t] : m->owner_subst.bindings())
            if (std::find(decl.type_params.begin(), decl.type_params.end(), v) == decl.type_params.end())
                partial.bind(v, t);
        unify(substitute(partial, decl.params[i].type), *arg_types[i], decl.type_params, table_, inferred, conflict);
    }
    for (const auto& tp : decl.type_params) {
        if (!inferred.lookup(tp)) {
            report(out, "type-mismatch", "cannot infer type parameter '" + tp + "' of '" + c.method + "'", pos);
            return std::nullopt;
        }
    }
    if (conflict) {
        report(out, "type-mismatch", "conflicting inferred type arguments for '" + c.method + "'", pos);
        return std::nullopt;
    }
    TypeSubstitution full = inferred;
    for (const auto& [v, t] : m->owner_subst.bindings())
        if (!full.lookup(v)) full.bind(v, t);

    bool ok = true;
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        TypeExpr want = substitute(full, decl.params[i].type);
        if (!table_.assignable(*arg_types[i], want)) {
            report(out, "type-mismatch",
                   "argument " + std::to_string(i + 1) + " of '" + c.method + "': expected " + show(want) + ", found " +
                       show(*arg_types[i]),
                   c.args[i].pos);
            ok = false;
        }
    }
    if (!ok) return std::nullopt;
    if (!decl.return_type) return builtin_type::void_type();
    return substitute(full, *decl.return_type);
}

std::optional<TypeExpr> TypeChecker::type_intrinsic(const IntrinsicExpr& in, SourcePos pos, TypeContext& ctx,
                                                    Diagnostics& out) const {
    std::vector<std::optional<TypeExpr>> args;
    for (const auto& a : in.args) args.push_back(type_of(a, ctx, out));
    if (std::any_of(args.begin(), args.end(), [](const auto& t) { return !t; })) return std::nullopt;

    auto fail = [&](const std::string& msg) -> std::optional<TypeExpr> {
        report(out, "invalid-intrinsic", "@" + in.name + ": " + msg, pos);
        return std::nullopt;
    };
    auto shape = [&](std::size_t ntypes, std::vector<const char*> kinds) -> bool {
        if (in.type_args.size() != ntypes || args.size() != kinds.size()) return false;
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            std::string_view k = kinds[i];
            if (k == "ref") {
                if (!table_.is_reference(*args[i])) return false;
            } else if (!args[i]->is_named(k)) {
                return false;
            }
        }
        return true;
    };

    if (in.name == intrinsic::field) {
        if (!shape(1, {"ref", "string"}) || !in.args[1].as<StringLit>())
            return fail("expected @field<T>(object, \"name\")");
        if (!check_type(in.type_args[0], ctx.type_vars, pos, out)) return std::nullopt;
        return in.type_args[0];
    }
    if (in.name == intrinsic::singleton) {
        if (!shape(1, {})) return fail("expected @singleton<C>()");
        if (!check_type(in.type_args[0], ctx.type_vars, pos, out)) return std::nullopt;
        const ClassDecl* c = table_.find_class(in.type_args[0].name);
        if (!c || c->is_abstract || (c->constructor && !c->constructor->params.empty()))
            return fail("'" + in.type_args[0].name + "' must be a concrete class with a zero-argument constructor");
        return in.type_args[0];
    }
    if (in.name == intrinsic::violation) {
        if (!shape(0, {"string", "int", "string", "string"}))
            return fail("expected @violation(class, index, phase, method)");
        return builtin_type::void_type();
    }
    if (in.name == intrinsic::check_event) {
        if (!shape(0, {"ref", "string", "string", "string"}))
            return fail("expected @check_event(object, class, phase, method)");
        return builtin_type::void_type();
    }
    if (in.name == intrinsic::evaluating) {
        if (!shape(0, {"string", "int"})) return fail("expected @evaluating(class, index)");
        return builtin_type::void_type();
    }
    return fail("unknown intrinsic");
}

std::optional<TypeExpr> TypeChecker::type_forall(const ForallExpr& f, SourcePos pos, TypeContext& ctx,
                                                 Diagnostics& out) const {
    auto init = type_of(*f.init, ctx, out);
    if (!init) return std::nullopt;
    if (init->is_named(builtin_type::null_name) || init->is_named(builtin_type::void_name)) {
        report(out, "type-mismatch", "cannot infer the type of quantifier variable '" + f.var + "'", pos);
        return std::nullopt;
    }
    ctx.scopes.emplace_back();
    ctx.declare(f.var, *init);
    bool ok = true;
    auto cond = type_of(*f.cond, ctx, out);
    if (cond && !cond->is_named("bool")) {
        report(out, "type-mismatch", "quantifier condition must be 'bool'", f.cond->pos);
        ok = false;
    }
    auto step = type_of(*f.step, ctx, out);
    if (step && !table_.assignable(*step, *init)) {
        report(out, "type-mismatch", "quantifier step must produce " + show(*init), f.step->pos);
        ok = false;
    }
    auto body = type_of(*f.body, ctx, out);
    if (body && !body->is_named("bool")) {
        report(out, "type-mismatch", "quantifier body must be 'bool'", f.body->pos);
        ok = false;
    }
    ctx.scopes.pop_back();
    if (!ok || !cond || !step || !body) return std::nullopt;
    return TypeExpr::bool_type();
}

} // namespace moo
