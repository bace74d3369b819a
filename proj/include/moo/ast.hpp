#pragma once

/// @file ast.hpp
/// @brief Abstract syntax tree for MiniOO, the subject language of the weaver.
///
/// The same tree is the input of the analyses and the output format of the
/// weaver: generated interfaces and classes are ordinary declarations that
/// the printer renders back to `.moo` source.
///
/// Nodes are value types. Children live in `Box<T>` (a copyable owning
/// pointer) or in vectors, so copying a declaration deep-copies it. Structural
/// equality (`operator==`) ignores source positions; this is the equality
/// used by the parse/render round-trip.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace moo {

struct SourcePos {
    int line = 0;
    int column = 0;
};

/// Heap-allocated value with deep-copy semantics; lets recursive variants
/// hold their children by value.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A type variable (`T`) or an applied named type (`List<T>`, `int`).
/// Primitives are nullary named types.
struct TypeExpr {
    enum class Kind { Var, Named };

    Kind kind = Kind::Named;
    std::string name;
    std::vector<TypeExpr> args;

    static TypeExpr var(std::string n) { return TypeExpr{Kind::Var, std::move(n), {}}; }
    static TypeExpr named(std::string n, std::vector<TypeExpr> a = {}) {
        return TypeExpr{Kind::Named, std::move(n), std::move(a)};
    }
    static TypeExpr int_type() { return named("int"); }
    static TypeExpr bool_type() { return named("bool"); }
    static TypeExpr string_type() { return named("string"); }

    bool is_var() const { return kind == Kind::Var; }
    bool is_named(std::string_view n) const { return kind == Kind::Named && name == n; }
    bool is_primitive() const;

    friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

std::string to_string(const TypeExpr& t);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Not, Neg };

std::string_view spelling(BinaryOp op);
std::string_view spelling(UnaryOp op);

struct IntLit { std::int64_t value = 0; friend bool operator==(const IntLit&, const IntLit&) = default; };
struct BoolLit { bool value = false; friend bool operator==(const BoolLit&, const BoolLit&) = default; };
struct StringLit { std::string value; friend bool operator==(const StringLit&, const StringLit&) = default; };
struct NullLit { friend bool operator==(const NullLit&, const NullLit&) = default; };
struct ThisExpr { friend bool operator==(const ThisExpr&, const ThisExpr&) = default; };

/// Bare identifier: a local, a parameter, or an implicit `this` field.
struct NameExpr {
    std::string name;
    friend bool operator==(const NameExpr&, const NameExpr&) = default;
};

struct FieldAccess {
    Box<Expr> object;
    std::string field;
    friend bool operator==(const FieldAccess&, const FieldAccess&) = default;
};

/// `recv.m(args)`, `m(args)` (implicit this) or `super.m(args)`.
struct CallExpr {
    std::optional<Box<Expr>> receiver;
    bool is_super = false;
    std::string method;
    std::vector<Expr> args;
    friend bool operator==(const CallExpr&, const CallExpr&) = default;
};

struct NewExpr {
    TypeExpr type;
    std::vector<Expr> args;
    friend bool operator==(const NewExpr&, const NewExpr&) = default;
};

struct BinaryExpr {
    BinaryOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    friend bool operator==(const BinaryExpr&, const BinaryExpr&) = default;
};

struct UnaryExpr {
    UnaryOp op;
    Box<Expr> operand;
    friend bool operator==(const UnaryExpr&, const UnaryExpr&) = default;
};

/// Interpreter primitive, written `@name<types>(args)`. The set of names is
/// fixed (see `Intrinsic` below); the parser rejects anything else.
struct IntrinsicExpr {
    std::string name;
    std::vector<TypeExpr> type_args;
    std::vector<Expr> args;
    friend bool operator==(const IntrinsicExpr&, const IntrinsicExpr&) = default;
};

/// Bounded quantifier `forall (x = init; cond; x = step) : body`. Only legal
/// in invariant predicates, never in program source.
struct ForallExpr {
    std::string var;
    Box<Expr> init;
    Box<Expr> cond;
    Box<Expr> step;
    Box<Expr> body;
    friend bool operator==(const ForallExpr&, const ForallExpr&) = default;
};

struct Expr {
    using Node = std::variant<IntLit, BoolLit, StringLit, NullLit, ThisExpr, NameExpr, FieldAccess,
                              CallExpr, NewExpr, BinaryExpr, UnaryExpr, IntrinsicExpr, ForallExpr>;
    Node node;
    SourcePos pos;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }
    template <typename T>
    T* as() { return std::get_if<T>(&node); }

    friend bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
};

namespace intrinsic {
inline constexpr std::string_view field = "field";             // @field<T>(obj, "name")
inline constexpr std::string_view singleton = "singleton";     // @singleton<C>()
inline constexpr std::string_view violation = "violation";     // @violation(cls, idx, phase, method)
inline constexpr std::string_view check_event = "check_event"; // @check_event(obj, cls, phase, method)
inline constexpr std::string_view evaluating = "evaluating";   // @evaluating(cls, idx)
bool is_known(std::string_view name);
} // namespace intrinsic

// Expression builders used by the parser tests and by the weaver.
namespace build {
Expr int_lit(std::int64_t v);
Expr bool_lit(bool v);
Expr string_lit(std::string v);
Expr null_lit();
Expr this_expr();
Expr name(std::string n);
Expr field(Expr object, std::string f);
Expr call(std::optional<Expr> receiver, std::string method, std::vector<Expr> args);
Expr super_call(std::string method, std::vector<Expr> args);
Expr new_object(TypeExpr t, std::vector<Expr> args);
Expr binary(BinaryOp op, Expr lhs, Expr rhs);
Expr unary(UnaryOp op, Expr operand);
Expr intrinsic(std::string name, std::vector<TypeExpr> type_args, std::vector<Expr> args);
} // namespace build

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Stmt;
using Block = std::vector<Stmt>;

struct LocalDecl {
    TypeExpr type;
    std::string name;
    std::optional<Expr> init;
    friend bool operator==(const LocalDecl&, const LocalDecl&) = default;
};

/// Target is a `NameExpr` or a `FieldAccess` path.
struct AssignStmt {
    Expr target;
    Expr value;
    friend bool operator==(const AssignStmt&, const AssignStmt&) = default;
};

struct IfStmt {
    Expr cond;
    Block then_branch;
    std::optional<Block> else_branch;
    friend bool operator==(const IfStmt&, const IfStmt&) = default;
};

struct WhileStmt {
    Expr cond;
    Block body;
    friend bool operator==(const WhileStmt&, const WhileStmt&) = default;
};

struct ReturnStmt {
    std::optional<Expr> value;
    friend bool operator==(const ReturnStmt&, const ReturnStmt&) = default;
};

struct ExprStmt {
    Expr expr;
    friend bool operator==(const ExprStmt&, const ExprStmt&) = default;
};

struct PrintStmt {
    Expr value;
    friend bool operator==(const PrintStmt&, const PrintStmt&) = default;
};

/// `super(args);` as the first statement of a constructor.
struct SuperCtorStmt {
    std::vector<Expr> args;
    friend bool operator==(const SuperCtorStmt&, const SuperCtorStmt&) = default;
};

struct Stmt {
    using Node = std::variant<LocalDecl, AssignStmt, IfStmt, WhileStmt, ReturnStmt, ExprStmt,
                              PrintStmt, SuperCtorStmt>;
    Node node;
    SourcePos pos;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }

    friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class Visibility { Public, Protected, Private };
std::string_view spelling(Visibility v);

struct Param {
    std::string name;
    TypeExpr type;
    friend bool operator==(const Param&, const Param&) = default;
};

struct FieldDecl {
    std::string name;
    TypeExpr type;
    Visibility visibility = Visibility::Public;
    SourcePos pos;
    friend bool operator==(const FieldDecl& a, const FieldDecl& b) {
        return a.name == b.name && a.type == b.type && a.visibility == b.visibility;
    }
};

struct MethodDecl {
    std::string name;
    Visibility visibility = Visibility::Public;
    bool is_abstract = false;
    std::vector<std::string> type_params;
    std::vector<Param> params;
    std::optional<TypeExpr> return_type; // nullopt = void
    std::optional<Block> body;           // nullopt iff abstract or interface member
    SourcePos pos;

    friend bool operator==(const MethodDecl& a, const MethodDecl& b) {
        return a.name == b.name && a.visibility == b.visibility && a.is_abstract == b.is_abstract &&
               a.type_params == b.type_params && a.params == b.params &&
               a.return_type == b.return_type && a.body == b.body;
    }
};

struct ConstructorDecl {
    Visibility visibility = Visibility::Public;
    std::vector<Param> params;
    Block body;
    SourcePos pos;

    friend bool operator==(const ConstructorDecl& a, const ConstructorDecl& b) {
        return a.visibility == b.visibility && a.params == b.params && a.body == b.body;
    }
};

struct ClassDecl {
    std::string name;
    std::vector<std::string> type_params;
    std::optional<TypeExpr> super_class;
    std::vector<TypeExpr> interfaces;
    bool is_abstract = false;
    std::vector<FieldDecl> fields;
    std::optional<ConstructorDecl> constructor;
    std::vector<MethodDecl> methods;
    SourcePos pos;

    const FieldDecl* find_field(std::string_view n) const;
    const MethodDecl* find_method(std::string_view n) const;
    /// The class's own applied type, `Name<P1, ..., Pk>`.
    TypeExpr self_type() const;

    friend bool operator==(const ClassDecl& a, const ClassDecl& b) {
        return a.name == b.name && a.type_params == b.type_params &&
               a.super_class == b.super_class && a.interfaces == b.interfaces &&
               a.is_abstract == b.is_abstract && a.fields == b.fields &&
               a.constructor == b.constructor && a.methods == b.methods;
    }
};

struct InterfaceDecl {
    std::string name;
    std::vector<std::string> type_params;
    std::vector<TypeExpr> extends;
    std::vector<MethodDecl> methods;
    SourcePos pos;

    const MethodDecl* find_method(std::string_view n) const;
    TypeExpr self_type() const;

    friend bool operator==(const InterfaceDecl& a, const InterfaceDecl& b) {
        return a.name == b.name && a.type_params == b.type_params && a.extends == b.extends &&
               a.methods == b.methods;
    }
};

struct DriverBlock {
    Block body;
    SourcePos pos;
    friend bool operator==(const DriverBlock& a, const DriverBlock& b) { return a.body == b.body; }
};

struct SourceUnit {
    std::vector<ClassDecl> classes;
    std::vector<InterfaceDecl> interfaces;
    std::optional<DriverBlock> driver;

    const ClassDecl* find_class(std::string_view n) const;
    const InterfaceDecl* find_interface(std::string_view n) const;
    bool declares(std::string_view n) const { return find_class(n) || find_interface(n); }

    /// Superclass declaration of `c`, when the superclass is declared in this unit.
    const ClassDecl* super_of(const ClassDecl& c) const;

    friend bool operator==(const SourceUnit&, const SourceUnit&) = default;
};

/// Concatenates units. The driver of `b` replaces that of `a` only when `a`
/// has none.
SourceUnit merge_units(SourceUnit a, SourceUnit b);

} // namespace moo
