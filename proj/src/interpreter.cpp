#include "moo/interpreter.hpp"

#include <deque>
#include <map>

namespace moo {

std::string format_value(const RuntimeValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, NullValue>) return "null";
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
            else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return x;
            else return "<object>";
        },
        v);
}

std::string ViolationRecord::format() const {
    return "VIOLATION " + class_name + " " + std::to_string(predicate_index) + " " + phase + " " + method;
}

std::string RuntimeFault::format() const {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": runtime error [" + code + "] " + message;
}

std::string CheckEvent::format() const {
    return "CHECK " + std::to_string(object) + " " + class_name + " " + phase + " " + method;
}

RuntimeAbort::RuntimeAbort(ViolationRecord v) : std::runtime_error(v.format()), violation_(std::move(v)) {}
RuntimeAbort::RuntimeAbort(RuntimeFault f) : std::runtime_error(f.format()), fault_(std::move(f)) {}

namespace {

struct Frame {
    std::optional<ObjectRef> self;
    const ClassDecl* lexical = nullptr; // class declaring the running body; null in the driver
    std::vector<std::map<std::string, RuntimeValue>> scopes{{}};

    RuntimeValue* lookup(const std::string& n) {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto f = it->find(n);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }
};

struct ScopeGuard {
    Frame& f;
    explicit ScopeGuard(Frame& frame) : f(frame) { f.scopes.emplace_back(); }
    ~ScopeGuard() { f.scopes.pop_back(); }
};

struct Flow {
    bool returned = false;
    RuntimeValue value;
};

RuntimeValue default_value(const TypeExpr& t) {
    if (t.is_named("int")) return std::int64_t{0};
    if (t.is_named("bool")) return false;
    return NullValue{};
}

} // namespace

struct Interpreter::Impl {
    const SourceUnit& unit;
    InterpreterOptions options;
    std::map<std::string, const ClassDecl*, std::less<>> classes;
    std::deque<ObjectInstance> heap; // id k lives at heap[k - 1]; deque keeps references stable
    std::map<std::string, ObjectRef> singletons;
    ExecutionResult state;
    std::function<void(const CheckEvent&)> observer;
    std::uint64_t steps = 0;
    std::size_t depth = 0;

    Impl(const SourceUnit& u, InterpreterOptions o) : unit(u), options(o) {
        for (const auto& c : unit.classes) classes.emplace(c.name, &c);
    }

    [[noreturn]] void fault(std::string code, std::string message, SourcePos pos) {
        throw RuntimeAbort(RuntimeFault{std::move(code), std::move(message), pos});
    }

    void tick(SourcePos pos) {
        if (++steps > options.step_budget) fault("step-budget", "step budget exhausted", pos);
    }

    const ClassDecl* find_class(std::string_view n) const {
        auto it = classes.find(n);
        return it == classes.end() ? nullptr : it->second;
    }

    const ClassDecl* super_of(const ClassDecl* c) const {
        return c && c->super_class ? find_class(c->super_class->name) : nullptr;
    }

    ObjectInstance& deref(const RuntimeValue& v, SourcePos pos, const std::string& what) {
        const ObjectRef* r = std::get_if<ObjectRef>(&v);
        if (!r) {
            if (std::holds_alternative<NullValue>(v)) fault("null-deref", "null dereference in " + what, pos);
            fault("not-an-object", what + " on a non-object value", pos);
        }
        return heap.at(r->id - 1);
    }

    // -- fields -------------------------------------------------------------

    /// Store key of field `name`, looked up from class `from` upward.
    std::optional<std::pair<std::string, std::string>> field_key(const ClassDecl* from, const std::string& name) const {
        for (const ClassDecl* c = from; c; c = super_of(c))
            if (c->find_field(name)) return std::make_pair(c->name, name);
        return std::nullopt;
    }

    RuntimeValue& field_slot(ObjectInstance& obj, const ClassDecl* from, const std::string& name, SourcePos pos) {
        auto key = field_key(from, name);
        if (!key) fault("no-such-field", "no field '" + name + "' on " + obj.class_name, pos);
        auto it = obj.fields.find(*key);
        if (it == obj.fields.end()) fault("no-such-field", "no field '" + name + "' on " + obj.class_name, pos);
        return it->second;
    }

    RuntimeValue& runtime_field(ObjectInstance& obj, const std::string& name, SourcePos pos) {
        return field_slot(obj, find_class(obj.class_name), name, pos);
    }

    // -- objects and calls ----------------------------------------------------

    ObjectRef allocate(const ClassDecl* cls) {
        ObjectInstance obj;
        obj.class_name = cls->name;
        for (const ClassDecl* c = cls; c; c = super_of(c))
            for (const auto& f : c->fields) obj.fields[{c->name, f.name}] = default_value(f.type);
        heap.push_back(std::move(obj));
        return ObjectRef{heap.size()};
    }

    ObjectRef instantiate(const std::string& name, std::vector<RuntimeValue> args, SourcePos pos) {
        const ClassDecl* cls = find_class(name);
        if (!cls) fault("no-such-class", "no class '" + name + "'", pos);
        if (cls->is_abstract) fault("abstract-instantiation", "cannot instantiate abstract '" + name + "'", pos);
        ObjectRef ref = allocate(cls);
        construct(cls, ref, std::move(args), pos);
        return ref;
    }

    void construct(const ClassDecl* cls, ObjectRef self, std::vector<RuntimeValue> args, SourcePos pos) {
        if (++depth > options.max_call_depth) {
            --depth;
            fault("stack-overflow", "call depth limit exceeded in constructor of " + cls->name, pos);
        }
        struct Leave {
            std::size_t& d;
            ~Leave() { --d; }
        } leave{depth};

        const ClassDecl* parent = super_of(cls);
        if (!cls->constructor) {
            if (!args.empty()) fault("arity", cls->name + " takes no constructor arguments", pos);
            if (parent) construct(parent, self, {}, pos);
            return;
        }
        const ConstructorDecl& k = *cls->constructor;
        if (k.params.size() != args.size()) fault("arity", "wrong number of arguments to " + cls->name, pos);
        Frame frame;
        frame.self = self;
        frame.lexical = cls;
        for (std::size_t i = 0; i < args.size(); ++i) frame.scopes.back()[k.params[i].name] = std::move(args[i]);

        std::size_t start = 0;
        if (!k.body.empty()) {
            if (const auto* sc = k.body.front().as<SuperCtorStmt>()) {
                std::vector<RuntimeValue> sargs;
                for (const auto& a : sc->args) sargs.push_back(eval(a, frame));
                if (parent) construct(parent, self, std::move(sargs), k.body.front().pos);
                start = 1;
            }
        }
        if (start == 0 && parent) construct(parent, self, {}, pos);
        ScopeGuard scope(frame);
        for (std::size_t i = start; i < k.body.size(); ++i)
            if (exec(k.body[i], frame).returned) break;
    }

    std::pair<const ClassDecl*, const MethodDecl*> find_method(const ClassDecl* from, const std::string& name) const {
        for (const ClassDecl* c = from; c; c = super_of(c)) {
            const MethodDecl* m = c->find_method(name);
            if (m && m->body) return {c, m};
        }
        return {nullptr, nullptr};
    }

    RuntimeValue invoke(const ClassDecl* owner, const MethodDecl& m, ObjectRef self, std::vector<RuntimeValue> args,
                        SourcePos pos) {
        if (m.params.size() != args.size()) fault("arity", "wrong number of arguments to " + m.name, pos);
        if (++depth > options.max_call_depth) {
            --depth;
            fault("stack-overflow", "call depth limit exceeded in " + m.name, pos);
        }
        struct Leave {
            std::size_t& d;
            ~Leave() { --d; }
        } leave{depth};

        Frame frame;
        frame.self = self;
        frame.lexical = owner;
        for (std::size_t i = 0; i < args.size(); ++i) frame.scopes.back()[m.params[i].name] = std::move(args[i]);
        Flow flow = exec_block(*m.body, frame);
        if (m.return_type && !flow.returned)
            fault("missing-return", owner->name + "." + m.name + " finished without returning a value", m.pos);
        return flow.returned ? flow.value : RuntimeValue{NullValue{}};
    }

    RuntimeValue call_on(const RuntimeValue& receiver, const ClassDecl* start, const std::string& method,
                         std::vector<RuntimeValue> args, SourcePos pos) {
        if (const ObjectRef* r = std::get_if<ObjectRef>(&receiver)) {
            if (!start) start = find_class(heap.at(r->id - 1).class_name);
            auto [owner, m] = find_method(start, method);
            if (m) return invoke(owner, *m, *r, std::move(args), pos);
        } else if (std::holds_alternative<NullValue>(receiver)) {
            fault("null-deref", "call of '" + method + "' on null", pos);
        }
        if (method == "equals" && args.size() == 1) return receiver == args[0];
        fault("no-such-method", "no method '" + method + "'", pos);
    }

    // -- statements -----------------------------------------------------------

    Flow exec_block(const Block& b, Frame& frame) {
        ScopeGuard scope(frame);
        for (const auto& s : b) {
            Flow f = exec(s, frame);
            if (f.returned) return f;
        }
        return {};
    }

    void assign_to(const Expr& target, RuntimeValue value, Frame& frame) {
        if (const auto* n = target.as<NameExpr>()) {
            if (RuntimeValue* slot = frame.lookup(n->name)) {
                *slot = std::move(value);
                return;
            }
            if (!frame.self) fault("unknown-name", "no variable '" + n->name + "'", target.pos);
            field_slot(heap.at(frame.self->id - 1), frame.lexical, n->name, target.pos) = std::move(value);
            return;
        }
        if (const auto* fa = target.as<FieldAccess>()) {
            RuntimeValue obj = eval(*fa->object, frame);
            ObjectInstance& o = deref(obj, target.pos, "assignment to '" + fa->field + "'");
            runtime_field(o, fa->field, target.pos) = std::move(value);
            return;
        }
        fault("bad-assignment", "invalid assignment target", target.pos);
    }

    Flow exec(const Stmt& s, Frame& frame) {
        tick(s.pos);
        return std::visit(
            [&](const auto& n) -> Flow {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LocalDecl>) {
                    frame.scopes.back()[n.name] = n.init ? eval(*n.init, frame) : default_value(n.type);
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    assign_to(n.target, eval(n.value, frame), frame);
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    if (truth(eval(n.cond, frame), n.cond.pos)) return exec_block(n.then_branch, frame);
                    if (n.else_branch) return exec_block(*n.else_branch, frame);
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    while (truth(eval(n.cond, frame), n.cond.pos)) {
                        tick(s.pos);
                        Flow f = exec_block(n.body, frame);
                        if (f.returned) return f;
                    }
                } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                    return Flow{true, n.value ? eval(*n.value, frame) : RuntimeValue{NullValue{}}};
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    eval(n.expr, frame);
                } else if constexpr (std::is_same_v<T, PrintStmt>) {
                    std::string line = format_value(eval(n.value, frame));
                    state.output.push_back(line);
                    state.transcript.push_back(std::move(line));
                } else if constexpr (std::is_same_v<T, SuperCtorStmt>) {
                    fault("invalid-super", "super(...) outside constructor head", s.pos);
                }
                return {};
            },
            s.node);
    }

    // -- expressions ----------------------------------------------------------

    bool truth(const RuntimeValue& v, SourcePos pos) {
        if (const bool* b = std::get_if<bool>(&v)) return *b;
        fault("not-a-bool", "condition is not a boolean", pos);
    }

    std::int64_t integer(const RuntimeValue& v, SourcePos pos) {
        if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
        fault("not-an-int", "operand is not an integer", pos);
    }

    static std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

    RuntimeValue binary(const BinaryExpr& b, SourcePos pos, Frame& frame) {
        if (b.op == BinaryOp::And) return truth(eval(*b.lhs, frame), pos) && truth(eval(*b.rhs, frame), pos);
        if (b.op == BinaryOp::Or) return truth(eval(*b.lhs, frame), pos) || truth(eval(*b.rhs, frame), pos);
        RuntimeValue l = eval(*b.lhs, frame);
        RuntimeValue r = eval(*b.rhs, frame);
        switch (b.op) {
        case BinaryOp::Eq: return l == r;
        case BinaryOp::Ne: return !(l == r);
        case BinaryOp::Add:
            if (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r))
                return format_value(l) + format_value(r);
            return wrap(static_cast<std::uint64_t>(integer(l, pos)) + static_cast<std::uint64_t>(integer(r, pos)));
        case BinaryOp::Sub:
            return wrap(static_cast<std::uint64_t>(integer(l, pos)) - static_cast<std::uint64_t>(integer(r, pos)));
        case BinaryOp::Mul:
            return wrap(static_cast<std::uint64_t>(integer(l, pos)) * static_cast<std::uint64_t>(integer(r, pos)));
        case BinaryOp::Div: {
            std::int64_t d = integer(r, pos);
            std::int64_t n = integer(l, pos);
            if (d == 0) fault("div-by-zero", "division by zero", pos);
            if (d == -1) return wrap(0 - static_cast<std::uint64_t>(n));
            return n / d;
        }
        case BinaryOp::Mod: {
            std::int64_t d = integer(r, pos);
            std::int64_t n = integer(l, pos);
            if (d == 0) fault("div-by-zero", "division by zero", pos);
            if (d == -1) return std::int64_t{0};
            return n % d;
        }
        case BinaryOp::Lt: return integer(l, pos) < integer(r, pos);
        case BinaryOp::Le: return integer(l, pos) <= integer(r, pos);
        case BinaryOp::Gt: return integer(l, pos) > integer(r, pos);
        case BinaryOp::Ge: return integer(l, pos) >= integer(r, pos);
        default: break;
        }
        fault("bad-operator", "unsupported operator", pos);
    }

    std::string string_arg(const RuntimeValue& v, SourcePos pos) {
        if (const auto* s = std::get_if<std::string>(&v)) return *s;
        fault("not-a-string", "intrinsic expects a string", pos);
    }

    RuntimeValue intrinsic(const IntrinsicExpr& in, SourcePos pos, Frame& frame) {
        std::vector<RuntimeValue> args;
        for (const auto& a : in.args) args.push_back(eval(a, frame));
        if (in.name == intrinsic::field) {
            ObjectInstance& o = deref(args.at(0), pos, "@field");
            return runtime_field(o, string_arg(args.at(1), pos), pos);
        }
        if (in.name == intrinsic::singleton) {
            const std::string& cls = in.type_args.at(0).name;
            auto it = singletons.find(cls);
            if (it != singletons.end()) return it->second;
            ObjectRef r = instantiate(cls, {}, pos);
            singletons.emplace(cls, r);
            return r;
        }
        if (in.name == intrinsic::violation) {
            throw RuntimeAbort(ViolationRecord{string_arg(args.at(0), pos), integer(args.at(1), pos),
                                               string_arg(args.at(2), pos), string_arg(args.at(3), pos)});
        }
        if (in.name == intrinsic::check_event) {
            const ObjectRef* r = std::get_if<ObjectRef>(&args.at(0));
            if (!r) fault("null-deref", "@check_event on a non-object", pos);
            CheckEvent e{r->id, string_arg(args.at(1), pos), string_arg(args.at(2), pos), string_arg(args.at(3), pos)};
            state.checks.push_back(e);
            if (options.trace) state.transcript.push_back(e.format());
            if (observer) observer(e);
            return NullValue{};
        }
        if (in.name == intrinsic::evaluating) {
            std::size_t check = state.checks.empty() ? 0 : state.checks.size() - 1;
            state.predicates.push_back(PredicateEvent{check, string_arg(args.at(0), pos), integer(args.at(1), pos)});
            return NullValue{};
        }
        fault("unknown-intrinsic", "unknown intrinsic @" + in.name, pos);
    }

    RuntimeValue eval(const Expr& e, Frame& frame) {
        return std::visit(
            [&](const auto& n) -> RuntimeValue {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, StringLit>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, NullLit>) {
                    return NullValue{};
                } else if constexpr (std::is_same_v<T, ThisExpr>) {
                    if (!frame.self) fault("invalid-this", "'this' outside an object", e.pos);
                    return *frame.self;
                } else if constexpr (std::is_same_v<T, NameExpr>) {
                    if (RuntimeValue* v = frame.lookup(n.name)) return *v;
                    if (!frame.self) fault("unknown-name", "no variable '" + n.name + "'", e.pos);
                    return field_slot(heap.at(frame.self->id - 1), frame.lexical, n.name, e.pos);
                } else if constexpr (std::is_same_v<T, FieldAccess>) {
                    RuntimeValue obj = eval(*n.object, frame);
                    return runtime_field(deref(obj, e.pos, "read of '" + n.field + "'"), n.field, e.pos);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    std::vector<RuntimeValue> args;
                    if (n.is_super) {
                        for (const auto& a : n.args) args.push_back(eval(a, frame));
                        if (!frame.self) fault("invalid-super", "'super' outside an object", e.pos);
                        const ClassDecl* parent = super_of(frame.lexical);
                        if (!parent) fault("no-such-method", "no superclass for super." + n.method, e.pos);
                        return call_on(*frame.self, parent, n.method, std::move(args), e.pos);
                    }
                    RuntimeValue recv;
                    if (n.receiver) {
                        recv = eval(**n.receiver, frame);
                    } else {
                        if (!frame.self) fault("invalid-this", "call of '" + n.method + "' outside an object", e.pos);
                        recv = *frame.self;
                    }
                    for (const auto& a : n.args) args.push_back(eval(a, frame));
                    return call_on(recv, nullptr, n.method, std::move(args), e.pos);
                } else if constexpr (std::is_same_v<T, NewExpr>) {
                    std::vector<RuntimeValue> args;
                    for (const auto& a : n.args) args.push_back(eval(a, frame));
                    return instantiate(n.type.name, std::move(args), e.pos);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    return binary(n, e.pos, frame);
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    RuntimeValue v = eval(*n.operand, frame);
                    if (n.op == UnaryOp::Not) return !truth(v, e.pos);
                    return wrap(0 - static_cast<std::uint64_t>(integer(v, e.pos)));
                } else if constexpr (std::is_same_v<T, IntrinsicExpr>) {
                    return intrinsic(n, e.pos, frame);
                } else {
                    // bounded quantifier, evaluated directly
                    ScopeGuard scope(frame);
                    frame.scopes.back()[n.var] = eval(*n.init, frame);
                    while (truth(eval(*n.cond, frame), e.pos)) {
                        tick(e.pos);
                        if (!truth(eval(*n.body, frame), e.pos)) return false;
                        frame.scopes.back()[n.var] = eval(*n.step, frame);
                    }
                    return true;
                }
            },
            e.node);
    }
};

Interpreter::Interpreter(const SourceUnit& unit, InterpreterOptions options)
    : impl_(std::make_unique<Impl>(unit, options)) {}

Interpreter::~Interpreter() = default;

ExecutionResult Interpreter::run() {
    if (!impl_->unit.driver) {
        impl_->state.fault = RuntimeFault{"missing-driver", "no driver block to run", {}};
        return impl_->state;
    }
    try {
        Frame frame;
        impl_->exec_block(impl_->unit.driver->body, frame);
    } catch (const RuntimeAbort& a) {
        impl_->state.violation = a.violation();
        impl_->state.fault = a.fault();
    }
    return impl_->state;
}

RuntimeValue Interpreter::dispatch_call(ObjectRef receiver, const std::string& method, std::vector<RuntimeValue> args) {
    return impl_->call_on(receiver, nullptr, method, std::move(args), {});
}

ObjectRef Interpreter::instantiate(const std::string& cls, std::vector<RuntimeValue> args) {
    return impl_->instantiate(cls, std::move(args), {});
}

RuntimeValue Interpreter::reflect_get(ObjectRef obj, const std::string& field) {
    return impl_->runtime_field(impl_->deref(obj, {}, "reflect_get"), field, {});
}

const ObjectInstance& Interpreter::object(ObjectRef ref) const { return impl_->heap.at(ref.id - 1); }

const ExecutionResult& Interpreter::state() const { return impl_->state; }

void Interpreter::set_check_observer(std::function<void(const CheckEvent&)> observer) {
    impl_->observer = std::move(observer);
}

ExecutionResult run_program(const SourceUnit& unit, bool trace) {
    InterpreterOptions o;
    o.trace = trace;
    return Interpreter(unit, o).run();
}

} // namespace moo
