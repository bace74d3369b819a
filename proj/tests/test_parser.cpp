#include <gtest/gtest.h>

#include <random>

#include "moo/parser.hpp"
#include "moo/printer.hpp"
#include "random_hierarchy.hpp"
#include "support.hpp"

using namespace moo;
using namespace moo::testing;

namespace {

std::string first_code(std::string_view src) {
    try {
        parse_unit(src);
    } catch (const CompileError& e) {
        return e.diagnostics().front().code;
    }
    return "";
}

std::string predicate_code(std::string_view src) {
    try {
        parse_predicate(src);
    } catch (const CompileError& e) {
        return e.diagnostics().front().code;
    }
    return "";
}

void expect_round_trip(const SourceUnit& u) {
    std::string text = render_source(u);
    SourceUnit again = parse_unit(text);
    EXPECT_EQ(again, u) << text;
    EXPECT_EQ(render_source(again), text);
}

} // namespace

TEST(Lexer, SkipsCommentsAndTracksPositions) {
    auto toks = tokenize("// note\nclass /* x */ A {}");
    ASSERT_EQ(toks.size(), 5u);
    EXPECT_EQ(toks[0].kind, TokenKind::KwClass);
    EXPECT_EQ(toks[0].pos.line, 2);
    EXPECT_EQ(toks[1].text, "A");
    EXPECT_EQ(toks[4].kind, TokenKind::End);
}

TEST(Lexer, RejectsStrayCharactersAndOpenStrings) {
    EXPECT_EQ(first_code("class A { int x = 1 # 2; }"), "lex-error");
    EXPECT_EQ(first_code("driver { print(\"open); }"), "lex-error");
    EXPECT_EQ(first_code("/* never closed"), "lex-error");
}

TEST(Parser, EmptyClassRendersCanonically) {
    SourceUnit u = parse_unit("class A{}");
    ASSERT_EQ(u.classes.size(), 1u);
    EXPECT_EQ(render_source(u), "class A {\n}\n");
}

TEST(Parser, DefaultsAndFieldLists) {
    SourceUnit u = parse_unit(R"(
class Node<T> {
    Node<T> prev, next;
    T value;
    int size() { return 0; }
}
)");
    const ClassDecl& c = u.classes[0];
    ASSERT_EQ(c.fields.size(), 3u);
    EXPECT_EQ(c.fields[1].name, "next");
    EXPECT_EQ(c.fields[1].type, TypeExpr::named("Node", {TypeExpr::var("T")}));
    EXPECT_EQ(c.fields[2].type, TypeExpr::var("T"));
    EXPECT_EQ(c.fields[0].visibility, Visibility::Public);
    EXPECT_EQ(c.methods[0].visibility, Visibility::Public);
}

TEST(Parser, GenericMethodsAndHeaders) {
    SourceUnit u = parse_unit(R"(
interface Sized { int size(); }
abstract class A<S> implements Sized {
    public abstract int size();
    public <W> W pick(W w) { return w; }
}
class B extends A<string> {
    public B() { super(); }
    public int size() { return 1; }
}
)");
    ASSERT_EQ(u.classes.size(), 2u);
    EXPECT_TRUE(u.classes[0].is_abstract);
    EXPECT_EQ(u.classes[0].methods[1].type_params, std::vector<std::string>{"W"});
    EXPECT_EQ(*u.classes[1].super_class, TypeExpr::named("A", {TypeExpr::string_type()}));
    ASSERT_TRUE(u.classes[1].constructor);
    expect_round_trip(u);
}

TEST(Parser, StructuralErrors) {
    EXPECT_EQ(first_code("class A { int x }"), "syntax-error");
    EXPECT_EQ(first_code("class A {} class A {}"), "duplicate-name");
    EXPECT_EQ(first_code("class A { int x; bool x; }"), "duplicate-name");
    EXPECT_EQ(first_code("class A extends B {} class B extends A {}"), "inheritance-cycle");
    EXPECT_EQ(first_code("driver { bool b = forall (n = 0; n < 3; n = n + 1) : true; }"), "syntax-error");
    EXPECT_EQ(first_code("driver { print(@nosuch()); }"), "syntax-error");
}

TEST(Parser, PrecedenceSurvivesRendering) {
    EXPECT_EQ(render_expr(parse_predicate("a + b * c == d")), "a + b * c == d");
    EXPECT_EQ(render_expr(parse_predicate("(a + b) * c == d")), "(a + b) * c == d");
    EXPECT_EQ(render_expr(parse_predicate("a - (b - c) > 0")), "a - (b - c) > 0");
    EXPECT_EQ(render_expr(parse_predicate("!(p || q) && r")), "!(p || q) && r");
    EXPECT_EQ(render_expr(parse_predicate("x % 2 == 0")), "x % 2 == 0");
}

TEST(Predicate, AcceptsQuantifiersOverPaths) {
    Expr e = parse_predicate("forall (n = head.next; n != tail; n = n.next) : n.next.prev == n");
    const auto* f = e.as<ForallExpr>();
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->var, "n");
    EXPECT_EQ(render_expr(e), "forall (n = head.next; n != tail; n = n.next) : n.next.prev == n");
}

TEST(Predicate, RejectsEffectsAndCalls) {
    EXPECT_EQ(predicate_code("size() > 0"), "impure-predicate");
    EXPECT_EQ(predicate_code("new A() == null"), "impure-predicate");
    EXPECT_EQ(predicate_code("size >"), "syntax-error");
}

TEST(RoundTrip, CorpusFiles) {
    for (const auto& p : fault_free_programs()) {
        SCOPED_TRACE(p.name);
        expect_round_trip(p.unit);
    }
    expect_round_trip(load_dlist(true).unit);
}

TEST(RoundTrip, GeneratedDeclarations) {
    for (const auto& p : fault_free_programs()) {
        SCOPED_TRACE(p.name);
        expect_round_trip(weave_or_die(p.unit, p.spec).as_unit());
    }
}

TEST(RoundTrip, RandomHierarchies) {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        RandomHierarchy h = random_hierarchy(rng);
        expect_round_trip(h.unit);
    }
}

TEST(RoundTrip, EqualityIgnoresPositions) {
    SourceUnit a = parse_unit("class A { int x; }");
    SourceUnit b = parse_unit("\n\n   class A {\n int   x ; }");
    EXPECT_EQ(a, b);
    EXPECT_NE(a.classes[0].pos.line, b.classes[0].pos.line);
}
