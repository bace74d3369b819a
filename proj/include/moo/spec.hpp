#pragma once

/// @file spec.hpp
/// @brief The stand-alone invariant specification that drives weaving.
///
/// Document format (UTF-8 JSON, no other keys accepted):
///
///     {"classes": [{"name": "DLinkedList", "invariant": ["size >= 0", ...]}, ...]}
///
/// Each string is one predicate; a class invariant is the conjunction of its
/// predicates in listed order.

#include <string>
#include <string_view>
#include <vector>

#include "moo/ast.hpp"
#include "moo/diagnostic.hpp"

namespace moo {

struct Predicate {
    Expr expr;
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct SpecEntry {
    std::string class_name;
    std::vector<Predicate> predicates;
    friend bool operator==(const SpecEntry&, const SpecEntry&) = default;
};

struct InvariantSpec {
    std::vector<SpecEntry> entries; // document order

    const SpecEntry* find(std::string_view class_name) const;
    bool specifies(std::string_view class_name) const { return find(class_name) != nullptr; }

    friend bool operator==(const InvariantSpec&, const InvariantSpec&) = default;
};

/// Throws CompileError: `malformed-spec` for document-shape problems,
/// `predicate-syntax` (naming class, predicate index and position) when a
/// predicate does not parse or uses a construct outside the predicate grammar.
InvariantSpec load_spec(std::string_view document);

/// Canonical JSON text; `load_spec(serialize_spec(s)) == s`.
std::string serialize_spec(const InvariantSpec& spec);

/// Empty iff every named class exists, every free variable of every
/// predicate is a declared or inherited field of its class, and every
/// predicate is boolean. Codes: `unknown-class`, `unknown-field`,
/// `non-boolean-predicate`, plus typing codes from the checker.
Diagnostics validate_spec(const InvariantSpec& spec, const SourceUnit& unit);

} // namespace moo
