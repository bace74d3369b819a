#include "moo/weaver.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

#include "moo/typecheck.hpp"
#include "moo/types.hpp"

namespace moo {

using namespace build;

namespace {

// ---------------------------------------------------------------------------
// Small AST helpers
// ---------------------------------------------------------------------------

template <typename T>
Stmt st(T node) { return Stmt{std::move(node), {}}; }

Stmt expr_stmt(Expr e) { return st(ExprStmt{std::move(e)}); }
Stmt assign(std::string target, Expr value) { return st(AssignStmt{name(std::move(target)), std::move(value)}); }
Stmt local(TypeExpr t, std::string n, Expr init) { return st(LocalDecl{std::move(t), std::move(n), std::move(init)}); }
Stmt ret(std::optional<Expr> v = std::nullopt) { return st(ReturnStmt{std::move(v)}); }
Stmt if_then(Expr cond, Block then_branch, std::optional<Block> else_branch = std::nullopt) {
    return st(IfStmt{std::move(cond), std::move(then_branch), std::move(else_branch)});
}

Expr self_call(std::string method, std::vector<Expr> args) { return call(this_expr(), std::move(method), std::move(args)); }
Expr not_(Expr e) { return unary(UnaryOp::Not, std::move(e)); }
Expr prim(std::string_view n, std::vector<TypeExpr> types, std::vector<Expr> args) {
    return build::intrinsic(std::string(n), std::move(types), std::move(args));
}

std::vector<TypeExpr> vars(const std::vector<std::string>& params) {
    std::vector<TypeExpr> out;
    for (const auto& p : params) out.push_back(TypeExpr::var(p));
    return out;
}

MethodDecl method(std::string n, Visibility v, std::vector<Param> params, std::optional<TypeExpr> ret_type, Block body) {
    MethodDecl m;
    m.name = std::move(n);
    m.visibility = v;
    m.params = std::move(params);
    m.return_type = std::move(ret_type);
    m.body = std::move(body);
    return m;
}

// ---------------------------------------------------------------------------
// Identifier collection, for collision-free generated names
// ---------------------------------------------------------------------------

void collect_block_names(const Block& b, std::set<std::string>& out) {
    for (const auto& s : b) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LocalDecl>) {
                    out.insert(n.name);
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    collect_block_names(n.then_branch, out);
                    if (n.else_branch) collect_block_names(*n.else_branch, out);
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    collect_block_names(n.body, out);
                }
            },
            s.node);
    }
}

std::set<std::string> member_names(const SourceUnit& unit) {
    std::set<std::string> out;
    auto from_method = [&](const MethodDecl& m) {
        out.insert(m.name);
        for (const auto& p : m.params) out.insert(p.name);
        if (m.body) collect_block_names(*m.body, out);
    };
    for (const auto& c : unit.classes) {
        for (const auto& f : c.fields) out.insert(f.name);
        for (const auto& m : c.methods) from_method(m);
        if (c.constructor) {
            for (const auto& p : c.constructor->params) out.insert(p.name);
            collect_block_names(c.constructor->body, out);
        }
    }
    for (const auto& i : unit.interfaces)
        for (const auto& m : i.methods) from_method(m);
    return out;
}

std::set<std::string> type_names(const SourceUnit& unit) {
    std::set<std::string> out{"int", "bool", "string"};
    for (const auto& c : unit.classes) out.insert(c.name);
    for (const auto& i : unit.interfaces) out.insert(i.name);
    return out;
}

const ClassDecl* specified_super(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec) {
    const ClassDecl* s = unit.super_of(c);
    return s && spec.specifies(s->name) ? s : nullptr;
}

/// Identity-preserving alpha-renaming of a class's parameters; the
/// substitution maps old parameters to the new ones.
struct Renaming {
    std::vector<std::string> params;
    TypeSubstitution subst;
    TypeExpr operator()(const TypeExpr& t) const { return substitute(subst, t); }
};

Renaming rename_params(const ClassDecl& c, const SourceUnit& unit) {
    NameSupply supply = NameSupply::preserving(type_names(unit));
    RenamedType r = alpha_rename(c.type_params, c.self_type(), supply);
    return Renaming{r.params, TypeSubstitution::from_lists(c.type_params, vars(r.params))};
}

/// `c` viewed as `ancestor`: substitution from ancestor's parameters to
/// types over c's parameters.
TypeSubstitution view_as(const ClassTable& table, const ClassDecl& c, const ClassDecl& ancestor) {
    auto view = table.as_supertype(c.self_type(), ancestor.name);
    if (!view || view->args.size() != ancestor.type_params.size()) return {};
    return TypeSubstitution::from_lists(ancestor.type_params, view->args);
}

/// Specified ancestors of c, root first, c last.
std::vector<const ClassDecl*> specified_chain(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec) {
    std::vector<const ClassDecl*> chain;
    for (const ClassDecl* k = &c; k; k = specified_super(*k, unit, spec)) chain.push_back(k);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

} // namespace

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

WeaveNames choose_names(const SourceUnit& unit, const InvariantSpec& spec, const ExposurePlan& plan) {
    WeaveNames n;
    NameSupply types = NameSupply::preserving(type_names(unit));
    NameSupply members = NameSupply::preserving(member_names(unit));
    for (const auto& e : spec.entries) {
        n.interface_of[e.class_name] = types.fresh("IExposed" + e.class_name);
        n.class_of[e.class_name] = types.fresh("Exposed" + e.class_name);
    }
    n.visitor = types.fresh("InvV");
    n.delta = members.fresh("_delta");
    n.phi1 = members.fresh("_phi1");
    n.phi2 = members.fresh("_phi2");
    n.inv = members.fresh("_inv");
    n.chi = members.fresh("_chi");
    for (const auto& e : spec.entries) {
        auto it = plan.per_class.find(e.class_name);
        if (it == plan.per_class.end()) continue;
        for (const auto& s : it->second.own_signatures)
            if (!n.getter_of.count(s.field)) n.getter_of[s.field] = members.fresh("_get_" + s.field);
    }
    for (const auto& e : spec.entries) n.visit_of[e.class_name] = "visit_" + e.class_name;
    return n;
}

// ---------------------------------------------------------------------------
// Exposure interface
// ---------------------------------------------------------------------------

InterfaceDecl gen_exposure_interface(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec,
                                     const ExposurePlan& plan, const WeaveNames& names) {
    ClassTable table(unit);
    Renaming ren = rename_params(c, unit);
    InterfaceDecl i;
    i.name = names.interface_of.at(c.name);
    i.type_params = ren.params;
    if (const ClassDecl* sup = specified_super(c, unit, spec)) {
        auto view = table.as_supertype(c.self_type(), sup->name);
        std::vector<TypeExpr> args;
        if (view)
            for (const auto& a : view->args) args.push_back(ren(a));
        i.extends.push_back(TypeExpr::named(names.interface_of.at(sup->name), std::move(args)));
    }
    auto it = plan.per_class.find(c.name);
    if (it != plan.per_class.end()) {
        for (const auto& s : it->second.own_signatures) {
            MethodDecl m;
            m.name = names.getter_of.at(s.field);
            m.return_type = ren(s.type);
            i.methods.push_back(std::move(m));
        }
    }
    return i;
}

// ---------------------------------------------------------------------------
// Exposed class
// ---------------------------------------------------------------------------

ClassDecl gen_exposed_class(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec,
                            const ExposurePlan& plan, const WeaveNames& names, const WeaveOptions& options,
                            ExposureRecord* record) {
    ClassTable table(unit);
    Renaming ren = rename_params(c, unit);
    ExposureRecord rec;
    rec.original = c.name;
    rec.interface_name = names.interface_of.at(c.name);
    rec.class_name = names.class_of.at(c.name);
    const ClassDecl* sup = specified_super(c, unit, spec);
    if (sup) rec.specified_super = sup->name;

    NameSupply locals = NameSupply::preserving(member_names(unit));
    for (const auto& n : {names.delta, names.phi1, names.phi2, names.inv, names.chi}) locals.reserve(n);
    const std::string method_param = locals.fresh("method");
    const std::string phase_param = locals.fresh("phase");
    const std::string verdict = locals.fresh("_v");

    ClassDecl e;
    e.name = rec.class_name;
    e.type_params = ren.params;
    e.is_abstract = c.is_abstract;
    if (options.naive_inheritance && sup) {
        // the flawed scheme: extend the parent's exposed class, handing our
        // own parameters straight to it
        std::vector<TypeExpr> args;
        for (std::size_t k = 0; k < sup->type_params.size(); ++k)
            args.push_back(k < ren.params.size() ? TypeExpr::var(ren.params[k]) : TypeExpr::int_type());
        e.super_class = TypeExpr::named(names.class_of.at(sup->name), std::move(args));
    } else {
        e.super_class = ren(c.self_type());
    }
    e.interfaces.push_back(TypeExpr::named(rec.interface_name, vars(ren.params)));
    e.fields.push_back(FieldDecl{names.delta, TypeExpr::int_type(), Visibility::Private, {}});

    const TypeExpr visitor_type = TypeExpr::named(names.visitor);
    auto check = [&](Expr phase) {
        Block fail;
        fail.push_back(local(visitor_type, verdict, prim(intrinsic::singleton, {visitor_type}, {})));
        fail.push_back(expr_stmt(prim(intrinsic::violation, {},
                                           {call(name(verdict), "failed_class", {}),
                                            call(name(verdict), "failed_index", {}), phase, name(method_param)})));
        Block gated;
        gated.push_back(expr_stmt(prim(intrinsic::check_event, {},
                                            {this_expr(), string_lit(c.name), phase, name(method_param)})));
        gated.push_back(if_then(not_(self_call(names.inv, {})), std::move(fail)));
        return if_then(binary(BinaryOp::Eq, name(names.delta), int_lit(0)), std::move(gated));
    };

    // phi1: entry check, then enter
    {
        Block b;
        b.push_back(check(string_lit("entry")));
        b.push_back(assign(names.delta, binary(BinaryOp::Add, name(names.delta), int_lit(1))));
        e.methods.push_back(method(names.phi1, Visibility::Private, {Param{method_param, TypeExpr::string_type()}},
                                   std::nullopt, std::move(b)));
    }
    // phi2: leave, then exit check
    {
        Block b;
        b.push_back(assign(names.delta, binary(BinaryOp::Sub, name(names.delta), int_lit(1))));
        b.push_back(check(name(phase_param)));
        e.methods.push_back(method(names.phi2, Visibility::Private,
                                   {Param{phase_param, TypeExpr::string_type()},
                                    Param{method_param, TypeExpr::string_type()}},
                                   std::nullopt, std::move(b)));
    }
    // inv: delegate to the shared visitor
    {
        Block b;
        b.push_back(local(visitor_type, verdict, prim(intrinsic::singleton, {visitor_type}, {})));
        b.push_back(expr_stmt(call(name(verdict), "reset", {})));
        b.push_back(expr_stmt(call(name(verdict), names.visit_of.at(c.name), {this_expr()})));
        b.push_back(ret(call(name(verdict), "valid", {})));
        e.methods.push_back(method(names.inv, Visibility::Protected, {}, TypeExpr::bool_type(), std::move(b)));
    }
    // constructor
    {
        ConstructorDecl k;
        if (c.constructor) {
            k.visibility = c.constructor->visibility;
            std::vector<Expr> args;
            for (const auto& p : c.constructor->params) {
                k.params.push_back(Param{p.name, ren(p.type)});
                args.push_back(name(p.name));
            }
            k.body.push_back(st(SuperCtorStmt{std::move(args)}));
        }
        k.body.push_back(assign(names.delta, binary(BinaryOp::Add, name(names.delta), int_lit(1))));
        k.body.push_back(expr_stmt(self_call(names.phi2, {string_lit("construction"), string_lit("<init>")})));
        e.constructor = std::move(k);
    }
    // wrappers for every public concrete method reachable on c
    {
        std::set<std::string> seen;
        for (const ClassDecl* k : table.class_chain(c)) {
            TypeSubstitution view = view_as(table, c, *k);
            for (const auto& m : k->methods) {
                if (!seen.insert(m.name).second) continue;
                if (m.visibility != Visibility::Public || m.is_abstract || !m.body) continue;

                std::set<std::string> taken(ren.params.begin(), ren.params.end());
                taken.insert(c.type_params.begin(), c.type_params.end());
                taken.insert(k->type_params.begin(), k->type_params.end());
                NameSupply mvars = NameSupply::preserving(taken);
                TypeSubstitution s;
                for (const auto& [p, t] : view.bindings()) s.bind(p, ren(t));
                MethodDecl w;
                w.name = m.name;
                w.visibility = Visibility::Public;
                for (const auto& p : m.type_params) {
                    std::string fresh = mvars.fresh(p);
                    w.type_params.push_back(fresh);
                    s.bind(p, TypeExpr::var(fresh));
                }
                std::vector<Expr> args;
                for (const auto& p : m.params) {
                    w.params.push_back(Param{p.name, substitute(s, p.type)});
                    args.push_back(name(p.name));
                }
                Block b;
                b.push_back(expr_stmt(self_call(names.phi1, {string_lit(m.name)})));
                if (m.return_type) {
                    w.return_type = substitute(s, *m.return_type);
                    b.push_back(local(*w.return_type, names.chi, super_call(m.name, std::move(args))));
                } else {
                    b.push_back(expr_stmt(super_call(m.name, std::move(args))));
                }
                b.push_back(expr_stmt(self_call(names.phi2, {string_lit("exit"), string_lit(m.name)})));
                if (m.return_type) b.push_back(ret(name(names.chi)));
                w.body = std::move(b);
                e.methods.push_back(std::move(w));
                rec.wrappers.push_back(m.name);
            }
        }
    }
    // getters for the whole interface chain, root first
    for (const ClassDecl* k : specified_chain(c, unit, spec)) {
        auto it = plan.per_class.find(k->name);
        if (it == plan.per_class.end()) continue;
        TypeSubstitution view = view_as(table, c, *k);
        for (const auto& sig : it->second.own_signatures) {
            TypeExpr t = ren(substitute(view, sig.type));
            auto field = table.find_field(c.self_type(), sig.field);
            Expr value = field && field->decl->visibility != Visibility::Private
                             ? Expr(build::field(this_expr(), sig.field))
                             : prim(intrinsic::field, {t}, {this_expr(), string_lit(sig.field)});
            Block b;
            b.push_back(ret(std::move(value)));
            e.methods.push_back(method(names.getter_of.at(sig.field), Visibility::Public, {}, t, std::move(b)));
            rec.getters.push_back(sig.field);
            if (k == &c) rec.signatures.push_back(sig.field);
        }
    }
    if (record) *record = std::move(rec);
    return e;
}

// ---------------------------------------------------------------------------
// Visitor
// ---------------------------------------------------------------------------

namespace {

/// Lowers one predicate into statements plus a boolean expression over the
/// visitor's locals. Quantifiers become flag-controlled loops; navigation
/// below the receiver becomes a reflective read.
class PredicateLowering {
public:
    PredicateLowering(const TypeChecker& checker, const ClassDecl& cls, NameSupply& supply, std::set<std::string>& used)
        : checker_(checker), supply_(supply), used_(used) {
        ctx_.cls = &cls;
        ctx_.type_vars = cls.type_params;
        ctx_.ignore_visibility = true;
    }

    Expr lower(const Expr& e, Block& pre) {
        return std::visit(
            [&](const auto& n) -> Expr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, NameExpr>) {
                    auto it = env_.find(n.name);
                    if (it != env_.end() && !it->second.empty()) return name(it->second.back());
                    return name(n.name);
                } else if constexpr (std::is_same_v<T, FieldAccess>) {
                    TypeExpr t = field_type(*n.object, n.field);
                    Expr object = lower(*n.object, pre);
                    return prim(intrinsic::field, {t}, {std::move(object), string_lit(n.field)});
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    Expr l = lower(*n.lhs, pre);
                    Expr r = lower(*n.rhs, pre);
                    return binary(n.op, std::move(l), std::move(r));
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    return unary(n.op, lower(*n.operand, pre));
                } else if constexpr (std::is_same_v<T, ForallExpr>) {
                    return lower_forall(n, pre);
                } else {
                    return e;
                }
            },
            e.node);
    }

private:
    TypeExpr type_of(const Expr& e) {
        Diagnostics ignored;
        auto t = checker_.type_of(e, ctx_, ignored);
        return t ? *t : builtin_type::null_type();
    }

    TypeExpr field_type(const Expr& object, const std::string& field) {
        auto ref = checker_.table().find_field(type_of(object), field);
        return ref ? ref->type : builtin_type::null_type();
    }

    std::string fresh_local(const std::string& base) {
        if (used_.insert(base).second) return base;
        std::string n = supply_.fresh(base);
        while (!used_.insert(n).second) n = supply_.fresh(base);
        return n;
    }

    Expr lower_forall(const ForallExpr& f, Block& pre) {
        TypeExpr t = type_of(*f.init);
        std::string flag = fresh_local("_q");
        pre.push_back(local(TypeExpr::bool_type(), flag, bool_lit(true)));
        Expr init = lower(*f.init, pre);
        std::string var = fresh_local(f.var);
        pre.push_back(local(t, var, std::move(init)));

        ctx_.scopes.emplace_back();
        ctx_.declare(f.var, t);
        env_[f.var].push_back(var);

        Block unused;
        Expr cond = lower(*f.cond, unused);
        Block body;
        Expr holds = lower(*f.body, body);
        Expr step = lower(*f.step, unused);
        Block advance;
        advance.push_back(assign(var, std::move(step)));
        Block stop;
        stop.push_back(assign(flag, bool_lit(false)));
        body.push_back(if_then(std::move(holds), std::move(advance), std::move(stop)));
        pre.push_back(st(WhileStmt{binary(BinaryOp::And, name(flag), std::move(cond)), std::move(body)}));

        env_[f.var].pop_back();
        ctx_.scopes.pop_back();
        return name(flag);
    }

    const TypeChecker& checker_;
    NameSupply& supply_;
    std::set<std::string>& used_;
    TypeContext ctx_;
    std::map<std::string, std::vector<std::string>> env_;
};

void collect_quantifier_vars(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ForallExpr>) {
                out.insert(n.var);
                collect_quantifier_vars(*n.init, out);
                collect_quantifier_vars(*n.cond, out);
                collect_quantifier_vars(*n.step, out);
                collect_quantifier_vars(*n.body, out);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                collect_quantifier_vars(*n.lhs, out);
                collect_quantifier_vars(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                collect_quantifier_vars(*n.operand, out);
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                collect_quantifier_vars(*n.object, out);
            }
        },
        e.node);
}

} // namespace

ClassDecl gen_visitor(const SourceUnit& unit, const InvariantSpec& spec, const ExposurePlan&,
                      const WeaveNames& names) {
    TypeChecker checker(unit);
    const ClassTable& table = checker.table();
    ClassDecl v;
    v.name = names.visitor;
    v.fields.push_back(FieldDecl{"_ok", TypeExpr::bool_type(), Visibility::Private, {}});
    v.fields.push_back(FieldDecl{"_failed_class", TypeExpr::string_type(), Visibility::Private, {}});
    v.fields.push_back(FieldDecl{"_failed_index", TypeExpr::int_type(), Visibility::Private, {}});
    auto self_field = [](const char* f) { return build::field(this_expr(), f); };
    auto set_field = [&](const char* f, Expr value) { return st(AssignStmt{self_field(f), std::move(value)}); };

    {
        Block b;
        b.push_back(set_field("_ok", bool_lit(true)));
        b.push_back(set_field("_failed_class", string_lit("")));
        b.push_back(set_field("_failed_index", int_lit(0)));
        v.methods.push_back(method("reset", Visibility::Public, {}, std::nullopt, std::move(b)));
    }
    {
        Block b;
        b.push_back(ret(self_field("_ok")));
        v.methods.push_back(method("valid", Visibility::Public, {}, TypeExpr::bool_type(), std::move(b)));
    }
    {
        Block b;
        b.push_back(ret(self_field("_failed_class")));
        v.methods.push_back(method("failed_class", Visibility::Public, {}, TypeExpr::string_type(), std::move(b)));
    }
    {
        Block b;
        b.push_back(ret(self_field("_failed_index")));
        v.methods.push_back(method("failed_index", Visibility::Public, {}, TypeExpr::int_type(), std::move(b)));
    }
    {
        Block b;
        b.push_back(set_field("_ok", bool_lit(false)));
        b.push_back(set_field("_failed_class", name("cls")));
        b.push_back(set_field("_failed_index", name("idx")));
        v.methods.push_back(method("_fail", Visibility::Private,
                                   {Param{"cls", TypeExpr::string_type()}, Param{"idx", TypeExpr::int_type()}},
                                   std::nullopt, std::move(b)));
    }

    for (const auto& entry : spec.entries) {
        const ClassDecl* c = unit.find_class(entry.class_name);
        if (!c) continue;
        FieldSet fv = invariant_free_vars(&entry);
        std::set<std::string> qvars;
        for (const auto& p : entry.predicates) collect_quantifier_vars(p.expr, qvars);

        std::set<std::string> reserved(fv.begin(), fv.end());
        reserved.insert(qvars.begin(), qvars.end());
        NameSupply supply = NameSupply::preserving(reserved);
        std::string obj = supply.fresh("obj");
        std::set<std::string> used(fv.begin(), fv.end());
        used.insert(obj);

        MethodDecl m;
        m.name = names.visit_of.at(c->name);
        m.visibility = Visibility::Public;
        m.type_params = c->type_params;
        m.params.push_back(Param{obj, TypeExpr::named(names.interface_of.at(c->name), vars(c->type_params))});
        Block b;
        if (const ClassDecl* sup = specified_super(*c, unit, spec)) {
            b.push_back(expr_stmt(self_call(names.visit_of.at(sup->name), {name(obj)})));
            Block stop;
            stop.push_back(ret());
            b.push_back(if_then(not_(self_field("_ok")), std::move(stop)));
        }
        for (const auto& x : fv) {
            auto ref = table.find_field(c->self_type(), x);
            if (!ref) continue;
            b.push_back(local(ref->type, x, call(name(obj), names.getter_of.at(x), {})));
        }
        PredicateLowering lowering(checker, *c, supply, used);
        for (std::size_t i = 0; i < entry.predicates.size(); ++i) {
            auto idx = static_cast<std::int64_t>(i);
            b.push_back(expr_stmt(prim(intrinsic::evaluating, {},
                                            {string_lit(c->name), int_lit(idx)})));
            Expr holds = lowering.lower(entry.predicates[i].expr, b);
            Block fail;
            fail.push_back(expr_stmt(self_call("_fail", {string_lit(c->name), int_lit(idx)})));
            fail.push_back(ret());
            b.push_back(if_then(not_(std::move(holds)), std::move(fail)));
        }
        m.body = std::move(b);
        v.methods.push_back(std::move(m));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Whole program
// ---------------------------------------------------------------------------

const ExposureRecord* WovenArtifacts::record_for(std::string_view original) const {
    for (const auto& r : records)
        if (r.original == original) return &r;
    return nullptr;
}

SourceUnit WovenArtifacts::as_unit() const {
    SourceUnit u;
    u.interfaces = interfaces;
    u.classes = exposed_classes;
    u.classes.push_back(visitor);
    return u;
}

WeaveResult weave_program(const SourceUnit& unit, const InvariantSpec& spec, const WeaveOptions& options) {
    WeaveResult result;
    auto absorb = [&](Diagnostics d) {
        for (auto& x : d) result.diagnostics.push_back(std::move(x));
        return has_errors(result.diagnostics);
    };
    if (absorb(typecheck_program(unit))) return result;
    if (absorb(validate_spec(spec, unit))) return result;
    Diagnostics notes;
    ExposurePlan plan = plan_exposure(unit, spec, &notes);
    if (absorb(std::move(notes))) return result;
    if (absorb(verify_exposure(plan, unit, spec))) return result;

    WeaveNames names = choose_names(unit, spec, plan);
    WovenArtifacts a;
    for (const auto& entry : spec.entries) {
        const ClassDecl* c = unit.find_class(entry.class_name);
        a.interfaces.push_back(gen_exposure_interface(*c, unit, spec, plan, names));
        ExposureRecord rec;
        a.exposed_classes.push_back(gen_exposed_class(*c, unit, spec, plan, names, options, &rec));
        a.records.push_back(std::move(rec));
    }
    a.visitor = gen_visitor(unit, spec, plan, names);
    a.report = space_report(a);

    if (!options.naive_inheritance) {
        SourceUnit merged = merge_units(unit, a.as_unit());
        Diagnostics woven = typecheck_program(merged);
        for (auto& d : woven) d.message = "in generated code: " + d.message;
        if (absorb(std::move(woven))) return result;
    }
    result.artifacts = std::move(a);
    return result;
}

// ---------------------------------------------------------------------------
// Space report
// ---------------------------------------------------------------------------

GenerationReport space_report(const WovenArtifacts& artifacts) {
    GenerationReport r;
    std::function<const ClassReport&(const ExposureRecord&)> visit = [&](const ExposureRecord& rec) -> const ClassReport& {
        auto it = r.per_class.find(rec.original);
        if (it != r.per_class.end()) return it->second;
        const ExposureRecord* parent = rec.specified_super ? artifacts.record_for(*rec.specified_super) : nullptr;
        ClassReport cr;
        cr.getters = rec.getters.size();
        cr.wrappers = rec.wrappers.size();
        cr.signatures = rec.signatures.size();
        std::size_t fresh_wrappers = 0;
        for (const auto& w : rec.wrappers) {
            bool inherited = parent && std::find(parent->wrappers.begin(), parent->wrappers.end(), w) !=
                                           parent->wrappers.end();
            if (!inherited) ++fresh_wrappers;
        }
        cr.new_members = cr.signatures + fresh_wrappers;
        cr.redundant = cr.getters + cr.wrappers - cr.new_members;
        if (parent) {
            const ClassReport& p = visit(*parent);
            cr.depth = p.depth + 1;
            cr.chain_redundancy = p.chain_redundancy + cr.redundant;
        } else {
            cr.chain_redundancy = cr.redundant;
        }
        return r.per_class.emplace(rec.original, cr).first->second;
    };
    for (const auto& rec : artifacts.records) visit(rec);
    for (const auto& [_, cr] : r.per_class) {
        r.depth = std::max(r.depth, cr.depth);
        r.max_new_members = std::max(r.max_new_members, cr.new_members);
        r.max_chain_redundancy = std::max(r.max_chain_redundancy, cr.chain_redundancy);
    }
    r.formula_bound = r.depth * (r.depth + 1) / 2 * r.max_new_members;
    return r;
}

std::string report_json(const GenerationReport& report) {
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    for (const auto& [name, c] : report.per_class) {
        per_class[name] = {{"getters", c.getters},
                           {"wrappers", c.wrappers},
                           {"signatures", c.signatures},
                           {"new_members", c.new_members},
                           {"redundant", c.redundant},
                           {"chain_redundancy", c.chain_redundancy},
                           {"depth", c.depth}};
    }
    nlohmann::ordered_json doc;
    doc["per_class"] = per_class;
    doc["depth"] = report.depth;
    doc["max_new_members"] = report.max_new_members;
    doc["formula_bound"] = report.formula_bound;
    doc["max_chain_redundancy"] = report.max_chain_redundancy;
    doc["within_bound"] = report.within_bound();
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Type-parameter bindings
// ---------------------------------------------------------------------------

std::optional<TypeExpr> ancestor_binding(const SourceUnit& unit, const TypeExpr& instance, std::string_view ancestor) {
    return ClassTable(unit).as_supertype(instance, ancestor);
}

std::vector<TypeSubstitution> binding_chain(const SourceUnit& unit, const TypeExpr& instance,
                                            std::string_view ancestor) {
    const ClassDecl* c = unit.find_class(instance.name);
    if (!c || c->type_params.size() != instance.args.size()) return {};
    std::vector<TypeSubstitution> chain{TypeSubstitution::from_lists(c->type_params, instance.args)};
    std::set<std::string> visited;
    while (c->name != ancestor) {
        if (!visited.insert(c->name).second || !c->super_class) return {};
        const ClassDecl* s = unit.find_class(c->super_class->name);
        if (!s || s->type_params.size() != c->super_class->args.size()) return {};
        chain.push_back(TypeSubstitution::from_lists(s->type_params, c->super_class->args));
        c = s;
    }
    return chain;
}

Diagnostics check_type_bindings(const SourceUnit& merged, const WovenArtifacts& artifacts) {
    static const std::vector<TypeExpr> ground{TypeExpr::string_type(), TypeExpr::int_type(), TypeExpr::bool_type()};
    ClassTable table(merged);
    Diagnostics out;
    auto render = [](const std::optional<TypeExpr>& t) { return t ? to_string(*t) : std::string("<unrelated>"); };
    for (const auto& rec : artifacts.records) {
        const ClassDecl* b = table.find_class(rec.original);
        const ClassDecl* be = table.find_class(rec.class_name);
        if (!b || !be) continue;
        std::vector<TypeExpr> args;
        for (std::size_t k = 0; k < b->type_params.size(); ++k) args.push_back(ground[k % ground.size()]);
        if (be->type_params.size() != args.size()) {
            out.push_back(Diagnostic{"binding-mismatch", rec.class_name + " does not take " + rec.original +
                                                             "'s type arguments", be->pos});
            continue;
        }
        TypeExpr inst = TypeExpr::named(b->name, args);
        TypeExpr inst_e = TypeExpr::named(be->name, args);
        auto mismatch = [&](const std::string& what, const std::optional<TypeExpr>& want,
                            const std::optional<TypeExpr>& got) {
            out.push_back(Diagnostic{"binding-mismatch",
                                     to_string(inst_e) + " binds " + what + " as " + render(got) + ", but " +
                                         to_string(inst) + " binds it as " + render(want),
                                     be->pos});
        };
        auto as_b = table.as_supertype(inst_e, b->name);
        if (!as_b || !(*as_b == inst)) mismatch(b->name, inst, as_b);

        for (const ExposureRecord* r = &rec; r; r = r->specified_super ? artifacts.record_for(*r->specified_super) : nullptr) {
            auto want = table.as_supertype(inst, r->original);
            auto got = table.as_supertype(inst_e, r->original);
            if (r != &rec && (!got || !want || !(*got == *want))) mismatch(r->original, want, got);
            std::optional<TypeExpr> want_i;
            if (want) want_i = TypeExpr::named(r->interface_name, want->args);
            auto got_i = table.as_supertype(inst_e, r->interface_name);
            if (!got_i || !want_i || !(*got_i == *want_i)) mismatch(r->interface_name, want_i, got_i);
        }
    }
    return out;
}

} // namespace moo
