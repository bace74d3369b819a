#pragma once

/// @file hierarchy.hpp
/// @brief Field-exposure analysis over a class hierarchy and its invariants.
///
/// Notation used below, per class A with invariant rho_A:
///   FV(rho_A)  receiver fields a predicate reads (root identifiers of field
///              paths, quantifier variables excluded);
///   BV(A)      fields declared directly in A;
///   I(A)       fields already exposed by the interfaces of A's specified
///              ancestors: empty when A's superclass is not specified,
///              otherwise I(C) + BV(C) + FV(rho_C) for the superclass C.
/// The exposure interface of A declares one getter per field of
/// (BV(A) + FV(rho_A)) \ I(A).

#include <map>
#include <set>
#include <string>
#include <vector>

#include "moo/ast.hpp"
#include "moo/diagnostic.hpp"
#include "moo/spec.hpp"

namespace moo {

using FieldSet = std::set<std::string>;

FieldSet free_vars(const Expr& predicate);
FieldSet free_vars(const Predicate& predicate);
/// Union over all predicates of `entry`; empty for a null entry.
FieldSet invariant_free_vars(const SpecEntry* entry);

FieldSet bound_vars(const ClassDecl& c);

FieldSet inherited_exposed(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec);

struct GetterSignature {
    std::string field;
    TypeExpr type; // in terms of the class's own type parameters
    friend bool operator==(const GetterSignature&, const GetterSignature&) = default;
};

/// Getter signatures of A's exposure interface, in class-chain order (A's
/// fields first, in declaration order, then its superclass's, ...). Free
/// variables that name no field are reported as `unresolved-field`.
std::vector<GetterSignature> interface_body(const ClassDecl& c, const InvariantSpec& spec, const SourceUnit& unit,
                                            Diagnostics* out = nullptr);

struct ClassExposure {
    std::vector<GetterSignature> own_signatures;
    FieldSet inherited_exposed;
    FieldSet free_vars;
    FieldSet bound_vars;
};

struct ExposurePlan {
    std::map<std::string, ClassExposure> per_class;
};

/// Computes the plan for every specified class declared in `unit`. `notes`
/// receives `unspecified-superclass` notes for classes whose interface
/// re-declares fields of a declared but unspecified superclass.
ExposurePlan plan_exposure(const SourceUnit& unit, const InvariantSpec& spec, Diagnostics* notes = nullptr);

/// Checks that every free variable of every invariant has a getter on the
/// class's exposure interface or one of its super-interfaces, with the
/// field's type (`exposure-gap` errors), and that classes below a specified
/// superclass need no getters beyond their own fields. The latter is checked
/// only where its hypothesis holds (fully specified ancestor chain, every own
/// field constrained, predicates reading only own or inherited-exposed
/// fields); elsewhere a `prop3-hypothesis` note is emitted.
Diagnostics verify_exposure(const ExposurePlan& plan, const SourceUnit& unit, const InvariantSpec& spec);

/// Looks up the getter for `field` starting at `class_name`'s interface and
/// following the specified superclass chain. Returns the declaring class.
std::optional<std::string> find_exposed_getter(const ExposurePlan& plan, const SourceUnit& unit,
                                               const InvariantSpec& spec, const std::string& class_name,
                                               const std::string& field);

} // namespace moo
