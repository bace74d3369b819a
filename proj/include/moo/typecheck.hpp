#pragma once

/// @file typecheck.hpp
/// @brief Static semantics of MiniOO.
///
/// Nominal subtyping along declared `extends`/`implements` edges with
/// type-argument substitution, Java-style visibility (private = declaring
/// class, protected = declaring class and subclasses), single inheritance,
/// no overloading. Method-level type parameters are inferred from argument
/// types. Types are erased at run time.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moo/ast.hpp"
#include "moo/diagnostic.hpp"
#include "moo/types.hpp"

namespace moo {

/// Internal types that cannot be written in source.
namespace builtin_type {
inline const std::string null_name = "null";
inline const std::string void_name = "void";
inline TypeExpr null_type() { return TypeExpr::named(null_name); }
inline TypeExpr void_type() { return TypeExpr::named(void_name); }
} // namespace builtin_type

/// Declaration lookups and subtyping over one SourceUnit. Holds pointers into
/// the unit, which must outlive the table.
class ClassTable {
public:
    explicit ClassTable(const SourceUnit& unit);

    const SourceUnit& unit() const { return *unit_; }
    const ClassDecl* find_class(std::string_view name) const;
    const InterfaceDecl* find_interface(std::string_view name) const;
    /// Type parameters of a declared class or interface; nullopt if undeclared.
    std::optional<std::vector<std::string>> params_of(std::string_view name) const;

    /// Declared supertypes of an applied class/interface type, with the
    /// type's arguments substituted in. Empty for primitives and variables.
    std::vector<TypeExpr> direct_supertypes(const TypeExpr& t) const;
    std::optional<TypeExpr> superclass_of(const TypeExpr& t) const;

    /// View `t` as an instance of the declaration `target` (walking the
    /// supertype graph), e.g. `DLinkedList<string>` as `AbstractList` gives
    /// `AbstractList<string>`.
    std::optional<TypeExpr> as_supertype(const TypeExpr& t, std::string_view target) const;
    bool is_subtype(const TypeExpr& sub, const TypeExpr& super) const;
    bool is_reference(const TypeExpr& t) const;
    bool assignable(const TypeExpr& from, const TypeExpr& to) const;
    /// True when class `sub` is `ancestor` or inherits from it.
    bool is_subclass(std::string_view sub, std::string_view ancestor) const;

    struct FieldRef {
        const ClassDecl* owner = nullptr;
        const FieldDecl* decl = nullptr;
        TypeExpr type; // declared type seen through the receiver's arguments
    };
    /// Most-derived field named `name` along the receiver's class chain.
    std::optional<FieldRef> find_field(const TypeExpr& receiver, std::string_view name) const;

    struct MethodRef {
        std::string owner;
        bool owner_is_interface = false;
        const MethodDecl* decl = nullptr;
        TypeSubstitution owner_subst; // owner's type params -> receiver-derived args
    };
    /// Most-derived method named `name`: the class chain first, then interfaces.
    std::optional<MethodRef> find_method(const TypeExpr& receiver, std::string_view name) const;

    /// Class chain from `c` upward (c first), restricted to declared classes.
    std::vector<const ClassDecl*> class_chain(const ClassDecl& c) const;

private:
    const SourceUnit* unit_;
    std::map<std::string, const ClassDecl*, std::less<>> classes_;
    std::map<std::string, const InterfaceDecl*, std::less<>> interfaces_;
};

/// Typing context of one body: enclosing class (null in the driver), type
/// variables in scope, local variable scopes.
struct TypeContext {
    const ClassDecl* cls = nullptr;
    std::vector<std::string> type_vars;
    std::optional<TypeExpr> return_type; // nullopt = void or driver
    bool in_method = false;
    /// Predicates read fields of arbitrary objects regardless of visibility.
    bool ignore_visibility = false;
    std::vector<std::map<std::string, TypeExpr>> scopes{{}};

    const TypeExpr* lookup_local(const std::string& name) const;
    void declare(const std::string& name, TypeExpr t) { scopes.back()[name] = std::move(t); }
};

class TypeChecker {
public:
    explicit TypeChecker(const SourceUnit& unit);

    /// Checks every declaration and the driver block.
    Diagnostics check_program();

    /// Types one expression in `ctx`, appending problems to `out`. Returns
    /// nullopt when the expression is ill-typed.
    std::optional<TypeExpr> type_of(const Expr& e, TypeContext& ctx, Diagnostics& out) const;

    /// Checks that `t` is well-formed with `type_vars` in scope.
    bool check_type(const TypeExpr& t, const std::vector<std::string>& type_vars, SourcePos pos,
                    Diagnostics& out) const;

    const ClassTable& table() const { return table_; }

private:
    void check_class(const ClassDecl& c, Diagnostics& out) const;
    void check_interface(const InterfaceDecl& i, Diagnostics& out) const;
    void check_implementations(const ClassDecl& c, Diagnostics& out) const;
    void check_block(const Block& b, TypeContext& ctx, Diagnostics& out) const;
    void check_stmt(const Stmt& s, TypeContext& ctx, Diagnostics& out) const;
    std::optional<TypeExpr> type_call(const CallExpr& c, SourcePos pos, TypeContext& ctx, Diagnostics& out) const;
    std::optional<TypeExpr> type_intrinsic(const IntrinsicExpr& in, SourcePos pos, TypeContext& ctx,
                                           Diagnostics& out) const;
    std::optional<TypeExpr> type_field(const FieldAccess& f, SourcePos pos, TypeContext& ctx,
                                       Diagnostics& out) const;
    std::optional<TypeExpr> type_forall(const ForallExpr& f, SourcePos pos, TypeContext& ctx,
                                        Diagnostics& out) const;
    bool check_args(const std::vector<Param>& params, const TypeSubstitution& subst,
                    const std::vector<Expr>& args, const std::string& what, SourcePos pos, TypeContext& ctx,
                    Diagnostics& out) const;
    bool visible(Visibility v, const std::string& owner, const TypeContext& ctx) const;

    ClassTable table_;
};

/// Convenience wrapper: `TypeChecker(unit).check_program()`.
Diagnostics typecheck_program(const SourceUnit& unit);

} // namespace moo
