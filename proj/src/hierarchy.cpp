#include "moo/hierarchy.hpp"

#include <algorithm>
#include <functional>

#include "moo/typecheck.hpp"

namespace moo {

namespace {

void collect_free(const Expr& e, std::set<std::string>& bound, FieldSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NameExpr>) {
                if (!bound.count(n.name)) out.insert(n.name);
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                collect_free(*n.object, bound, out); // `head.next` contributes `head`
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                collect_free(*n.lhs, bound, out);
                collect_free(*n.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                collect_free(*n.operand, bound, out);
            } else if constexpr (std::is_same_v<T, ForallExpr>) {
                collect_free(*n.init, bound, out);
                bool fresh = bound.insert(n.var).second;
                collect_free(*n.cond, bound, out);
                collect_free(*n.step, bound, out);
                collect_free(*n.body, bound, out);
                if (fresh) bound.erase(n.var);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                if (n.receiver) collect_free(**n.receiver, bound, out);
                for (const auto& a : n.args) collect_free(a, bound, out);
            } else if constexpr (std::is_same_v<T, IntrinsicExpr>) {
                for (const auto& a : n.args) collect_free(a, bound, out);
            } else if constexpr (std::is_same_v<T, NewExpr>) {
                for (const auto& a : n.args) collect_free(a, bound, out);
            }
        },
        e.node);
}

const ClassDecl* specified_super(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec) {
    const ClassDecl* s = unit.super_of(c);
    return s && spec.specifies(s->name) ? s : nullptr;
}

} // namespace

FieldSet free_vars(const Expr& predicate) {
    FieldSet out;
    std::set<std::string> bound;
    collect_free(predicate, bound, out);
    return out;
}

FieldSet free_vars(const Predicate& predicate) { return free_vars(predicate.expr); }

FieldSet invariant_free_vars(const SpecEntry* entry) {
    FieldSet out;
    if (!entry) return out;
    for (const auto& p : entry->predicates) {
        FieldSet fv = free_vars(p);
        out.insert(fv.begin(), fv.end());
    }
    return out;
}

FieldSet bound_vars(const ClassDecl& c) {
    FieldSet out;
    for (const auto& f : c.fields) out.insert(f.name);
    return out;
}

FieldSet inherited_exposed(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec) {
    const ClassDecl* sup = specified_super(c, unit, spec);
    if (!sup) return {};
    FieldSet out = inherited_exposed(*sup, unit, spec);
    FieldSet bv = bound_vars(*sup);
    FieldSet fv = invariant_free_vars(spec.find(sup->name));
    out.insert(bv.begin(), bv.end());
    out.insert(fv.begin(), fv.end());
    return out;
}

std::vector<GetterSignature> interface_body(const ClassDecl& c, const InvariantSpec& spec, const SourceUnit& unit,
                                            Diagnostics* out) {
    FieldSet wanted = bound_vars(c);
    FieldSet fv = invariant_free_vars(spec.find(c.name));
    wanted.insert(fv.begin(), fv.end());
    for (const auto& x : inherited_exposed(c, unit, spec)) wanted.erase(x);

    ClassTable table(unit);
    std::vector<GetterSignature> body;
    FieldSet placed;
    TypeExpr self = c.self_type();
    for (const ClassDecl* k : table.class_chain(c)) {
        for (const auto& f : k->fields) {
            if (!wanted.count(f.name) || placed.count(f.name)) continue;
            auto ref = table.find_field(self, f.name);
            if (!ref || ref->owner != k) continue; // hidden by a nearer declaration
            body.push_back(GetterSignature{f.name, ref->type});
            placed.insert(f.name);
        }
    }
    if (out) {
        for (const auto& x : wanted)
            if (!placed.count(x))
                out->push_back(Diagnostic{"unresolved-field",
                                          "free variable '" + x + "' of " + c.name + "'s invariant names no field", c.pos});
    }
    return body;
}

ExposurePlan plan_exposure(const SourceUnit& unit, const InvariantSpec& spec, Diagnostics* notes) {
    ExposurePlan plan;
    for (const auto& entry : spec.entries) {
        const ClassDecl* c = unit.find_class(entry.class_name);
        if (!c) continue;
        ClassExposure x;
        x.own_signatures = interface_body(*c, spec, unit, notes);
        x.inherited_exposed = inherited_exposed(*c, unit, spec);
        x.free_vars = invariant_free_vars(&entry);
        x.bound_vars = bound_vars(*c);
        if (notes) {
            const ClassDecl* sup = unit.super_of(*c);
            if (sup && !spec.specifies(sup->name)) {
                for (const auto& s : x.own_signatures) {
                    if (!x.bound_vars.count(s.field)) {
                        notes->push_back(Diagnostic{
                            "unspecified-superclass",
                            c->name + "'s exposure interface declares a getter for '" + s.field +
                                "' of unspecified superclass '" + sup->name +
                                "'; specifying that class later duplicates the getter",
                            c->pos, Severity::Note});
                    }
                }
            }
        }
        plan.per_class.emplace(entry.class_name, std::move(x));
    }
    return plan;
}

std::optional<std::string> find_exposed_getter(const ExposurePlan& plan, const SourceUnit& unit,
                                               const InvariantSpec& spec, const std::string& class_name,
                                               const std::string& field) {
    const ClassDecl* c = unit.find_class(class_name);
    while (c) {
        auto it = plan.per_class.find(c->name);
        if (it == plan.per_class.end()) return std::nullopt;
        const auto& sigs = it->second.own_signatures;
        if (std::any_of(sigs.begin(), sigs.end(), [&](const GetterSignature& s) { return s.field == field; }))
            return c->name;
        c = specified_super(*c, unit, spec);
    }
    return std::nullopt;
}

Diagnostics verify_exposure(const ExposurePlan& plan, const SourceUnit& unit, const InvariantSpec& spec) {
    Diagnostics out;
    ClassTable table(unit);
    for (const auto& entry : spec.entries) {
        const ClassDecl* c = unit.find_class(entry.class_name);
        if (!c) continue;
        auto pc = plan.per_class.find(c->name);
        if (pc == plan.per_class.end()) {
            out.push_back(Diagnostic{"exposure-gap", "no exposure plan for '" + c->name + "'", c->pos});
            continue;
        }

        for (const auto& x : invariant_free_vars(&entry)) {
            auto owner = find_exposed_getter(plan, unit, spec, c->name, x);
            if (!owner) {
                out.push_back(Diagnostic{"exposure-gap", c->name + "." + x + " is not exposed by any getter", c->pos});
                continue;
            }
            // the getter's declared type, viewed from c, must be the field's type
            const ClassDecl* oc = unit.find_class(*owner);
            const auto& sigs = plan.per_class.at(*owner).own_signatures;
            auto sig = std::find_if(sigs.begin(), sigs.end(), [&](const GetterSignature& s) { return s.field == x; });
            auto field = table.find_field(c->self_type(), x);
            auto view = table.as_supertype(c->self_type(), oc->name);
            if (!field || !view || oc->type_params.size() != view->args.size()) {
                out.push_back(Diagnostic{"exposure-gap", c->name + "." + x + " has no resolvable type", c->pos});
                continue;
            }
            TypeExpr seen = substitute(TypeSubstitution::from_lists(oc->type_params, view->args), sig->type);
            if (!(seen == field->type))
                out.push_back(Diagnostic{"exposure-gap",
                                         c->name + "." + x + " is exposed with type '" + to_string(seen) +
                                             "' but declared '" + to_string(field->type) + "'",
                                         c->pos});
        }

        // below a specified superclass, only own fields need new getters
        const ClassDecl* sup = specified_super(*c, unit, spec);
        if (!sup) continue;
        const ClassExposure& x = pc->second;
        bool chain_specified = true;
        for (const ClassDecl* k : table.class_chain(*c))
            chain_specified = chain_specified && spec.specifies(k->name);
        if (chain_specified) {
            const ClassDecl* top = table.class_chain(*c).back();
            chain_specified = !top->super_class; // the chain must end at a root
        }
        FieldSet reachable = x.bound_vars;
        reachable.insert(x.inherited_exposed.begin(), x.inherited_exposed.end());
        bool fv_within = std::includes(reachable.begin(), reachable.end(), x.free_vars.begin(), x.free_vars.end());
        bool bv_covered = std::includes(x.free_vars.begin(), x.free_vars.end(), x.bound_vars.begin(), x.bound_vars.end());
        bool disjoint = std::none_of(x.bound_vars.begin(), x.bound_vars.end(),
                                     [&](const std::string& f) { return x.inherited_exposed.count(f) > 0; });
        if (!(chain_specified && fv_within && bv_covered && disjoint)) {
            out.push_back(Diagnostic{"prop3-hypothesis",
                                     c->name + ": own-fields-only exposure not checked (ancestor chain not fully "
                                               "specified, or the invariant leaves own fields unconstrained or reads "
                                               "unexposed fields)",
                                     c->pos, Severity::Note});
            continue;
        }
        FieldSet lhs;
        std::set_difference(x.free_vars.begin(), x.free_vars.end(), x.inherited_exposed.begin(),
                            x.inherited_exposed.end(), std::inserter(lhs, lhs.end()));
        if (lhs != x.bound_vars)
            out.push_back(Diagnostic{"prop3-violation",
                                     c->name + ": FV \\ I differs from the class's own fields", c->pos});
    }
    return out;
}

} // namespace moo
