#pragma once

#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "moo/ast.hpp"
#include "moo/spec.hpp"

namespace moo::testing {

struct RandomHierarchyOptions {
    std::size_t max_depth = 8;   // inheritance edges on the longest chain
    std::size_t max_members = 7; // fields + methods per class
    std::size_t max_classes = 12;
    bool generic = true;
    bool fully_specified = true;
    bool allow_hiding = false; // a subclass may redeclare an ancestor's field name
};

inline void PrintTo(const RandomHierarchyOptions& o, std::ostream* os) {
    *os << "depth" << o.max_depth << "_members" << o.max_members << (o.generic ? "_generic" : "")
        << (o.fully_specified ? "_full" : "_partial");
}

/// Ground truth recorded while generating, for oracles that must not lean on
/// the library's own analyses.
struct GeneratedClass {
    std::string name;
    std::string parent; // empty for a root
    std::vector<std::string> params;
    std::vector<TypeExpr> parent_args;
    std::vector<std::pair<std::string, TypeExpr>> fields; // declaration order
    std::set<std::string> public_methods;
    bool specified = false;
    std::set<std::string> predicate_fields; // free variables of the invariant
    std::size_t depth = 0;
};

struct RandomHierarchy {
    std::string source;
    std::string spec_json;
    SourceUnit unit;
    InvariantSpec spec;
    std::vector<GeneratedClass> classes; // parents before children
    std::size_t depth = 0;

    const GeneratedClass* find(const std::string& name) const;
};

/// Classes `C0..Ck` plus an unspecified helper `Cell<E>`; every method is
/// `public int mK()` or `protected int pK()`, every predicate a tautology.
RandomHierarchy random_hierarchy(std::mt19937& rng, const RandomHierarchyOptions& options = {});

} // namespace moo::testing
