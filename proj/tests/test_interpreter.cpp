#include <gtest/gtest.h>

#include "moo/interpreter.hpp"
#include "moo/parser.hpp"
#include "moo/typecheck.hpp"
#include "support.hpp"

using namespace moo;
using namespace moo::testing;

namespace {

ExecutionResult run_text(const std::string& src, InterpreterOptions opts = {}) {
    SourceUnit u = parse_unit(src);
    Diagnostics ds = typecheck_program(u);
    EXPECT_FALSE(has_errors(ds)) << (ds.empty() ? "" : ds.front().format());
    Interpreter in(u, opts);
    return in.run();
}

std::string out(const std::string& src) { return joined(run_text(src).output); }

std::string fault_code(const std::string& src, InterpreterOptions opts = {}) {
    ExecutionResult r = run_text(src, opts);
    return r.fault ? r.fault->code : "";
}

const char* kShapes = R"(
class A {
    private int x;
    public A() { x = 1; }
    public int who() { return 1; }
    public int callWho() { return this.who(); }
    public int ax() { return x; }
}
class B extends A {
    private int x;
    public B() { super(); x = 2; }
    public int who() { return 2 + super.who() * 10; }
    public int bx() { return x; }
}
)";

} // namespace

TEST(Interpreter, ValuesAndOperators) {
    EXPECT_EQ(out("driver { print(7 / 2); print(-7 / 2); print(7 % 3); print(1 + 2 * 3); }"), "3\n-3\n1\n7\n");
    EXPECT_EQ(out("driver { print(\"a\" + 1 + true); print(null == null); print(\"ab\" == \"a\" + \"b\"); }"),
              "a1true\ntrue\ntrue\n");
    EXPECT_EQ(out("driver { int i = 0; int s = 0; while (i < 5) { s = s + i; i = i + 1; } print(s); }"), "10\n");
    EXPECT_EQ(out("driver { bool b = false; if (b || !b) { print(\"y\"); } else { print(\"n\"); } }"), "y\n");
}

TEST(Interpreter, DispatchAndFieldResolution) {
    std::string src = std::string(kShapes) + R"(
driver {
    A a = new B();
    print(a.who());
    print(a.callWho());
    print(a.ax());
    B b = new B();
    print(b.bx());
    print(a.equals(a));
    print(a.equals(b));
    print(a);
}
)";
    EXPECT_EQ(out(src), "12\n12\n1\n2\ntrue\nfalse\n<object>\n");
}

TEST(Interpreter, ObjectIdsAndReflection) {
    SourceUnit u = parse_unit(kShapes);
    Interpreter in(u);
    ObjectRef b = in.instantiate("B", {});
    EXPECT_EQ(b.id, 1u);
    EXPECT_EQ(in.object(b).class_name, "B");
    EXPECT_EQ(std::get<std::int64_t>(in.reflect_get(b, "x")), 2); // nearest declaration
    EXPECT_EQ(in.object(b).fields.at({"A", "x"}), RuntimeValue{std::int64_t{1}});
    EXPECT_EQ(std::get<std::int64_t>(in.dispatch_call(b, "who", {})), 12);
    EXPECT_EQ(in.instantiate("A", {}).id, 2u);
}

TEST(Interpreter, Faults) {
    EXPECT_EQ(fault_code("class N { public N next; } driver { N n = null; print(n.next); }"), "null-deref");
    EXPECT_EQ(fault_code("driver { int z = 0; print(1 / z); }"), "div-by-zero");
    EXPECT_EQ(fault_code("driver { int z = 0; print(1 % z); }"), "div-by-zero");
    InterpreterOptions tight;
    tight.step_budget = 1000;
    EXPECT_EQ(fault_code("driver { while (true) { } }", tight), "step-budget");
    EXPECT_EQ(fault_code("class R { public int f(int n) { return this.f(n + 1); } } driver { R r = new R(); r.f(0); }"),
              "stack-overflow");
    ExecutionResult r = run_text("driver { print(1); int z = 0; print(2 / z); print(3); }");
    EXPECT_EQ(r.output, std::vector<std::string>{"1"});
    EXPECT_FALSE(r.completed());
}

TEST(Interpreter, MissingDriver) {
    SourceUnit u = parse_unit("class A { }");
    ExecutionResult r = Interpreter(u).run();
    ASSERT_TRUE(r.fault);
    EXPECT_EQ(r.fault->code, "missing-driver");
}

TEST(Checking, FaultyRemoveIsCaughtOnExit) {
    CorpusProgram p = load_dlist(true);
    ExecutionResult plain = run_program(p.unit);
    EXPECT_TRUE(plain.completed());
    EXPECT_EQ(plain.output.back(), "testRemove passed");

    SourceUnit w = woven_program(p.unit, weave_or_die(p.unit, p.spec));
    ExecutionResult r = run_program(w, true);
    ASSERT_TRUE(r.violation);
    EXPECT_EQ(r.violation->format(), "VIOLATION DLinkedList 0 exit remove");
    ASSERT_FALSE(r.checks.empty());
    EXPECT_EQ(r.checks.front().format(), "CHECK 1 DLinkedList construction <init>");
    EXPECT_EQ(r.transcript.back(), "CHECK 1 DLinkedList exit remove");
}

TEST(Checking, ConstructionAndEntryViolations) {
    SourceUnit u = parse_unit(R"(
class Acct {
    public int balance;
    public Acct(int b) { balance = b; }
    public void touch() { }
}
driver {
    Acct ok = new Acct(5);
    ok.touch();
    ok.balance = -1;
    ok.touch();
}
)");
    InvariantSpec s = load_spec(R"({"classes": [{"name": "Acct", "invariant": ["balance >= 0"]}]})");
    WovenArtifacts a = weave_or_die(u, s);
    ExecutionResult r = run_program(woven_program(u, a));
    ASSERT_TRUE(r.violation);
    EXPECT_EQ(r.violation->format(), "VIOLATION Acct 0 entry touch");

    SourceUnit bad = u;
    bad.driver = parse_unit("driver { Acct x = new Acct(-3); }").driver;
    ExecutionResult rb = run_program(woven_program(bad, a));
    ASSERT_TRUE(rb.violation);
    EXPECT_EQ(rb.violation->format(), "VIOLATION Acct 0 construction <init>");
}

TEST(Checking, ParentPredicatesFirst) {
    CorpusProgram p = load_corpus("counter");
    ExecutionResult r = run_program(woven_program(p.unit, weave_or_die(p.unit, p.spec)));
    ASSERT_TRUE(r.completed());
    std::map<std::string, std::vector<std::string>> order{
        {"Counter", {"Counter 0", "Counter 1"}},
        {"ModCounter", {"Counter 0", "Counter 1", "ModCounter 0", "ModCounter 1"}},
        {"Odometer", {"Counter 0", "Counter 1", "ModCounter 0", "ModCounter 1", "Odometer 0", "Odometer 1"}},
    };
    std::map<std::size_t, std::vector<std::string>> seen;
    for (const auto& e : r.predicates) seen[e.check].push_back(e.class_name + " " + std::to_string(e.index));
    ASSERT_EQ(seen.size(), r.checks.size());
    for (std::size_t i = 0; i < r.checks.size(); ++i) EXPECT_EQ(seen[i], order.at(r.checks[i].class_name)) << i;
}

// At every check, each getter returns exactly what the field store holds.
TEST(Checking, ExposureIsFaithful) {
    for (const auto& p : fault_free_programs()) {
        SCOPED_TRACE(p.name);
        WovenArtifacts a = weave_or_die(p.unit, p.spec);
        SourceUnit w = woven_program(p.unit, a);
        ClassTable table(w);
        Interpreter in(w);
        std::size_t compared = 0;
        in.set_check_observer([&](const CheckEvent& e) {
            ObjectRef obj{e.object};
            const ExposureRecord* rec = a.record_for(e.class_name);
            ASSERT_NE(rec, nullptr);
            const ClassDecl* original = w.find_class(e.class_name);
            for (const auto& f : rec->getters) {
                auto ref = table.find_field(original->self_type(), f);
                ASSERT_TRUE(ref);
                RuntimeValue direct = in.object(obj).fields.at({ref->owner->name, f});
                RuntimeValue got = in.dispatch_call(obj, "_get_" + f, {});
                EXPECT_EQ(format_value(got), format_value(direct)) << e.format() << " " << f;
                EXPECT_EQ(got, direct);
                ++compared;
            }
        });
        ExecutionResult r = in.run();
        EXPECT_TRUE(r.completed());
        EXPECT_GT(compared, 0u);
    }
}
