#pragma once

#include <random>
#include <string>
#include <vector>

#include "moo/interpreter.hpp"
#include "moo/weaver.hpp"
#include "random_hierarchy.hpp"
#include "support.hpp"

namespace moo::testing {

/// Inherited exposed fields by direct recursion over the generated ground
/// truth, memoized per class.
std::map<std::string, std::set<std::string>> memoized_inherited(const RandomHierarchy& h);

/// Field type declared somewhere above `cls`, viewed from `cls<params>`.
TypeExpr oracle_field_type(const RandomHierarchy& h, const std::string& cls, const std::string& field);

/// Each returned string describes one failure; empty means the property holds.
std::vector<std::string> check_inherited_sets(const RandomHierarchy& h, const ExposurePlan& plan);
std::vector<std::string> check_interface_identity(const RandomHierarchy& h, const WovenArtifacts& a);
std::vector<std::string> check_getter_lookup(const RandomHierarchy& h, const WovenArtifacts& a);
std::vector<std::string> check_own_fields_equation(const RandomHierarchy& h, const ExposurePlan& plan);
std::vector<std::string> check_space_bound(const RandomHierarchy& h, const WovenArtifacts& a);

/// A class of a corpus hierarchy that call scripts may instantiate.
struct ScriptClass {
    std::string name;
    std::string type_args;          // e.g. `<int>`
    std::string ctor_args;          // `#` is replaced by a small integer
    std::vector<std::string> calls; // e.g. `add(#)`; a leading `=` marks a value-returning call
};

struct GatingTarget {
    std::string corpus;
    std::vector<ScriptClass> classes;
};

/// The hierarchies used for gating scripts.
std::vector<GatingTarget> gating_targets();

struct CallScript {
    std::string driver;
    /// Expected (variable, class, phase, method) per check, in order.
    struct Expected {
        std::size_t variable;
        std::string class_name;
        std::string phase;
        std::string method;
    };
    std::vector<Expected> expected;
};

CallScript random_script(std::mt19937& rng, const GatingTarget& target);

/// Runs `script`, with its `new` expressions exposed, against the woven
/// classes and compares the check events with the expected ones. Empty on
/// success.
std::vector<std::string> check_gating(const SourceUnit& woven_classes, const WovenArtifacts& artifacts,
                                      const CallScript& script);

} // namespace moo::testing
