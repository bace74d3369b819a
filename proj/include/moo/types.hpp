#pragma once

/// @file types.hpp
/// @brief Type-parameter substitution, composition and alpha-renaming.
///
/// A `TypeSubstitution` is a simultaneous substitution `[S1 -> t1, ..., Sk -> tk]`.
/// Chains are written the way they are read in the literature,
/// `[s1][s2]...[sn] T`, and evaluated innermost (rightmost) first:
/// `apply_chain({s1, s2}, T) == substitute(s1, substitute(s2, T))`.

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "moo/ast.hpp"

namespace moo {

class TypeSubstitution {
public:
    TypeSubstitution() = default;
    /// Throws std::invalid_argument if a variable is bound twice.
    TypeSubstitution(std::initializer_list<std::pair<std::string, TypeExpr>> bindings);

    /// Binds `params[i] -> args[i]`; sizes must match.
    static TypeSubstitution from_lists(const std::vector<std::string>& params,
                                       const std::vector<TypeExpr>& args);

    void bind(std::string var, TypeExpr image);
    const TypeExpr* lookup(std::string_view var) const;
    bool empty() const { return bindings_.empty(); }
    const std::vector<std::pair<std::string, TypeExpr>>& bindings() const { return bindings_; }

    friend bool operator==(const TypeSubstitution&, const TypeSubstitution&) = default;

private:
    std::vector<std::pair<std::string, TypeExpr>> bindings_;
};

TypeExpr substitute(const TypeSubstitution& subst, const TypeExpr& t);

/// `compose(outer, inner)` is the single substitution equal to applying
/// `inner` first and `outer` second.
TypeSubstitution compose(const TypeSubstitution& outer, const TypeSubstitution& inner);

/// Applies `[chain[0]][chain[1]]...[chain[n-1]] t`.
TypeExpr apply_chain(const std::vector<TypeSubstitution>& chain, const TypeExpr& t);

/// Type variables occurring in `t`.
std::set<std::string> free_type_vars(const TypeExpr& t);

/// Deterministic supply of fresh type-variable names: `S` becomes `S_X1`,
/// then `S_X2`, ... The counter is part of the value and threads explicitly.
/// A preserving supply hands back the requested name itself unless it is
/// reserved, and only then falls back to the suffixed form.
class NameSupply {
public:
    NameSupply() = default;
    explicit NameSupply(std::set<std::string> reserved) : reserved_(std::move(reserved)) {}
    static NameSupply preserving(std::set<std::string> reserved) {
        NameSupply s(std::move(reserved));
        s.preserve_ = true;
        return s;
    }

    std::string fresh(const std::string& base);
    void reserve(const std::string& name) { reserved_.insert(name); }

private:
    std::set<std::string> reserved_;
    int counter_ = 0;
    bool preserve_ = false;
};

class NameCollision : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RenamedType {
    std::vector<std::string> params;
    TypeExpr type;
};

/// Capture-avoiding renaming of the binders `params` in `t`. Every parameter
/// gets a name from `supply`. Throws NameCollision when a supplied name is
/// free in `t` or duplicates another renamed parameter.
RenamedType alpha_rename(const std::vector<std::string>& params, const TypeExpr& t, NameSupply& supply);

/// Canonical representative of the alpha-equivalence class: binders become
/// `#0, #1, ...` in order.
RenamedType alpha_normalize(const std::vector<std::string>& params, const TypeExpr& t);

bool alpha_equivalent(const std::vector<std::string>& p1, const TypeExpr& t1,
                      const std::vector<std::string>& p2, const TypeExpr& t2);

} // namespace moo
