#pragma once

/// @file interpreter.hpp
/// @brief Tree-walking interpreter for MiniOO.
///
/// Types are erased. Objects live in an ever-growing heap and are named by
/// ids starting at 1. Each object's field store is keyed by (declaring class,
/// field name), so a subclass field never clobbers a private superclass field
/// of the same name.
///
/// Name resolution at run time:
///   - a bare field name inside a method body resolves from the class that
///     lexically declares the body, upward;
///   - `e.f` and `@field(e, "f")` resolve from the runtime class of `e`, upward;
///   - `m(...)` and `e.m(...)` dispatch on the runtime class;
///   - `super.m(...)` starts at the superclass of the lexically enclosing class.
///
/// Any fault (null dereference, missing field, division by zero, falling off
/// the end of a value-returning method, exhausted step budget) aborts the run,
/// as does `@violation`.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "moo/ast.hpp"

namespace moo {

struct NullValue {
    friend bool operator==(NullValue, NullValue) { return true; }
};

struct ObjectRef {
    std::size_t id = 0;
    friend bool operator==(ObjectRef, ObjectRef) = default;
};

using RuntimeValue = std::variant<NullValue, std::int64_t, bool, std::string, ObjectRef>;

/// `true`/`false`, `null`, strings raw, decimal integers, `<object>`.
std::string format_value(const RuntimeValue& v);

struct ObjectInstance {
    std::string class_name; // most-derived class
    std::map<std::pair<std::string, std::string>, RuntimeValue> fields; // (declaring class, name)
};

struct ViolationRecord {
    std::string class_name;
    std::int64_t predicate_index = 0;
    std::string phase; // entry | exit | construction
    std::string method;

    /// `VIOLATION <class> <index> <phase> <method>`
    std::string format() const;
    friend bool operator==(const ViolationRecord&, const ViolationRecord&) = default;
};

struct RuntimeFault {
    std::string code; // null-deref, no-such-field, no-such-method, div-by-zero, missing-return, ...
    std::string message;
    SourcePos pos;

    std::string format() const;
};

struct CheckEvent {
    std::size_t object = 0;
    std::string class_name;
    std::string phase;
    std::string method;

    /// `CHECK <object-id> <class> <phase> <method>`
    std::string format() const;
    friend bool operator==(const CheckEvent&, const CheckEvent&) = default;
};

/// Emitted when the visitor starts evaluating a predicate; `check` indexes
/// the check event in progress.
struct PredicateEvent {
    std::size_t check = 0;
    std::string class_name;
    std::int64_t index = 0;
};

struct ExecutionResult {
    std::vector<std::string> output;     // print statements
    std::vector<std::string> transcript; // print output interleaved with CHECK lines (trace mode)
    std::vector<CheckEvent> checks;
    std::vector<PredicateEvent> predicates;
    std::optional<ViolationRecord> violation;
    std::optional<RuntimeFault> fault;

    bool completed() const { return !violation && !fault; }
};

/// Thrown out of `dispatch_call`, `instantiate` and `reflect_get` when the
/// program aborts; `run` catches it and records it in the result.
class RuntimeAbort : public std::runtime_error {
public:
    explicit RuntimeAbort(ViolationRecord v);
    explicit RuntimeAbort(RuntimeFault f);

    const std::optional<ViolationRecord>& violation() const { return violation_; }
    const std::optional<RuntimeFault>& fault() const { return fault_; }

private:
    std::optional<ViolationRecord> violation_;
    std::optional<RuntimeFault> fault_;
};

struct InterpreterOptions {
    bool trace = false;
    std::uint64_t step_budget = 50'000'000;
    std::size_t max_call_depth = 2'000;
};

class Interpreter {
public:
    /// The unit must outlive the interpreter.
    explicit Interpreter(const SourceUnit& unit, InterpreterOptions options = {});
    ~Interpreter();
    Interpreter(const Interpreter&) = delete;
    Interpreter& operator=(const Interpreter&) = delete;

    /// Executes the driver block. A unit without a driver yields a
    /// `missing-driver` fault.
    ExecutionResult run();

    /// Calls `method` on `receiver` with dynamic dispatch.
    RuntimeValue dispatch_call(ObjectRef receiver, const std::string& method, std::vector<RuntimeValue> args);
    /// `new cls(args)`.
    ObjectRef instantiate(const std::string& cls, std::vector<RuntimeValue> args);
    /// First field named `field` walking from the runtime class upward,
    /// regardless of visibility.
    RuntimeValue reflect_get(ObjectRef obj, const std::string& field);

    const ObjectInstance& object(ObjectRef ref) const;
    /// Events and output accumulated so far (also for calls made directly).
    const ExecutionResult& state() const;
    void set_check_observer(std::function<void(const CheckEvent&)> observer);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// `Interpreter(unit, {trace}).run()`.
ExecutionResult run_program(const SourceUnit& unit, bool trace = false);

} // namespace moo
