#pragma once

/// @file weaver.hpp
/// @brief Generates exposure interfaces, exposed classes and the invariant
/// visitor for a specified class hierarchy.
///
/// For each specified class `A<T>` the weaver emits
///
///     interface IExposedA<T> extends IExposedSuper<...> { τ _get_x(); ... }
///     class ExposedA<T> extends A<T> implements IExposedA<T> { ... }
///
/// plus one visitor class `InvV` holding a `visit_A` method per specified
/// class. Exposed classes never extend one another; only the interfaces
/// mirror the original hierarchy, which is what lets `visit_B` hand its
/// argument to `visit_A`.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moo/ast.hpp"
#include "moo/diagnostic.hpp"
#include "moo/hierarchy.hpp"
#include "moo/spec.hpp"
#include "moo/types.hpp"

namespace moo {

/// Per-class bookkeeping of what was generated.
struct ExposureRecord {
    std::string original;
    std::string interface_name;
    std::string class_name;
    std::optional<std::string> specified_super;
    std::vector<std::string> signatures; // fields with a getter declared on the own interface
    std::vector<std::string> getters;    // fields with a getter implemented in the exposed class
    std::vector<std::string> wrappers;   // wrapped method names
};

struct ClassReport {
    std::size_t getters = 0;
    std::size_t wrappers = 0;
    std::size_t signatures = 0;
    std::size_t new_members = 0;      // own signatures + wrappers the parent's exposed class lacks
    std::size_t redundant = 0;        // getters + wrappers - new_members
    std::size_t chain_redundancy = 0; // redundant members summed over the specified ancestor chain
    std::size_t depth = 0;            // specified inheritance edges above this class
};

struct GenerationReport {
    std::map<std::string, ClassReport> per_class;
    std::size_t depth = 0;           // h
    std::size_t max_new_members = 0; // n
    std::size_t formula_bound = 0;   // h(h+1)/2 * n
    std::size_t max_chain_redundancy = 0;

    bool within_bound() const { return max_chain_redundancy <= formula_bound; }
};

struct WovenArtifacts {
    std::vector<InterfaceDecl> interfaces;
    std::vector<ClassDecl> exposed_classes;
    ClassDecl visitor;
    std::vector<ExposureRecord> records; // spec order
    GenerationReport report;

    const ExposureRecord* record_for(std::string_view original) const;
    /// The generated declarations as one unit: interfaces, exposed classes, visitor.
    SourceUnit as_unit() const;
};

struct WeaveOptions {
    /// Reproduces the flawed scheme in which an exposed class extends its
    /// parent's exposed class, passing its own type parameters straight
    /// through. Output of this mode is not expected to typecheck.
    bool naive_inheritance = false;
};

struct WeaveResult {
    std::optional<WovenArtifacts> artifacts; // absent when any error was reported
    Diagnostics diagnostics;                 // errors and notes of every stage
};

/// Generated identifiers, fixed once per weave so that interfaces, classes
/// and the visitor agree.
struct WeaveNames {
    std::map<std::string, std::string> interface_of; // original class -> IExposed name
    std::map<std::string, std::string> class_of;     // original class -> Exposed name
    std::map<std::string, std::string> getter_of;    // field -> getter method name
    std::map<std::string, std::string> visit_of;     // original class -> visitor method name
    std::string visitor = "InvV";
    std::string delta = "_delta";
    std::string phi1 = "_phi1";
    std::string phi2 = "_phi2";
    std::string inv = "_inv";
    std::string chi = "_chi";
};

WeaveNames choose_names(const SourceUnit& unit, const InvariantSpec& spec, const ExposurePlan& plan);

InterfaceDecl gen_exposure_interface(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec,
                                     const ExposurePlan& plan, const WeaveNames& names);

ClassDecl gen_exposed_class(const ClassDecl& c, const SourceUnit& unit, const InvariantSpec& spec,
                            const ExposurePlan& plan, const WeaveNames& names, const WeaveOptions& options = {},
                            ExposureRecord* record = nullptr);

ClassDecl gen_visitor(const SourceUnit& unit, const InvariantSpec& spec, const ExposurePlan& plan,
                      const WeaveNames& names);

WeaveResult weave_program(const SourceUnit& unit, const InvariantSpec& spec, const WeaveOptions& options = {});

GenerationReport space_report(const WovenArtifacts& artifacts);

/// `report.json` text (keys `per_class`, `depth`, `max_new_members`, `formula_bound`).
std::string report_json(const GenerationReport& report);

/// Binding of `ancestor`'s type parameters when `instance` is viewed through
/// its supertype chain, e.g. `B<string>` as `A` gives `A<...>`. Nullopt when
/// `ancestor` is not a supertype.
std::optional<TypeExpr> ancestor_binding(const SourceUnit& unit, const TypeExpr& instance,
                                         std::string_view ancestor);

/// The per-edge substitutions met while walking from `instance`'s class up
/// to `ancestor` along superclass edges, outermost (the instantiation)
/// first, in the order `apply_chain` expects. Empty when unreachable.
std::vector<TypeSubstitution> binding_chain(const SourceUnit& unit, const TypeExpr& instance,
                                            std::string_view ancestor);

/// For every exposed class B_E instantiated with ground arguments, checks
/// that B_E is a drop-in subtype of B and that every specified ancestor A
/// and its exposure interface are bound exactly as they are for the
/// original `B<...>`. Reports `binding-mismatch` errors.
Diagnostics check_type_bindings(const SourceUnit& merged, const WovenArtifacts& artifacts);

} // namespace moo
