#include <gtest/gtest.h>

#include <random>

#include "moo/hierarchy.hpp"
#include "moo/parser.hpp"
#include "moo/weaver.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace moo;
using namespace moo::testing;

namespace {

FieldSet fv(std::string_view predicate) { return free_vars(parse_predicate(predicate)); }

std::vector<std::string> body_fields(const ClassDecl& c, const InvariantSpec& s, const SourceUnit& u) {
    std::vector<std::string> out;
    for (const auto& g : interface_body(c, s, u)) out.push_back(g.field);
    return out;
}

} // namespace

TEST(FreeVars, RootsOfPathsOnly) {
    EXPECT_EQ(fv("head.next.prev == head && size >= 0"), (FieldSet{"head", "size"}));
    EXPECT_EQ(fv("forall (n = head.next; n != tail; n = n.next) : n.next.prev == n"), (FieldSet{"head", "tail"}));
    EXPECT_EQ(fv("1 + 2 == 3"), FieldSet{});
    // a quantifier variable shadows a field of the same name
    EXPECT_EQ(fv("forall (n = head; n != null; n = n.next) : n.v > 0"), FieldSet{"head"});
    EXPECT_EQ(fv("forall (n = n; n != null; n = n.next) : n.v > 0"), FieldSet{"n"});
}

TEST(Exposure, DoublyLinkedList) {
    CorpusProgram p = load_dlist();
    const ClassDecl& dl = *p.unit.find_class("DLinkedList");
    const ClassDecl& al = *p.unit.find_class("AbstractList");
    EXPECT_EQ(bound_vars(dl), (FieldSet{"head", "tail"}));
    EXPECT_EQ(inherited_exposed(dl, p.unit, p.spec), FieldSet{"size"});
    EXPECT_EQ(inherited_exposed(al, p.unit, p.spec), FieldSet{});
    EXPECT_EQ(body_fields(dl, p.spec, p.unit), (std::vector<std::string>{"head", "tail"}));
    EXPECT_EQ(body_fields(al, p.spec, p.unit), std::vector<std::string>{"size"});
    auto sigs = interface_body(dl, p.spec, p.unit);
    EXPECT_EQ(render_type(sigs[0].type), "DNode<T>");
}

TEST(Exposure, InvariantReachingIntoUnspecifiedSuperclass) {
    SourceUnit u = parse_unit(R"(
class Base { protected int a; private int b; }
class Mid extends Base { protected int c; }
class Top extends Mid { private int d; }
)");
    InvariantSpec s = load_spec(R"({"classes": [
        {"name": "Base", "invariant": ["a >= 0"]},
        {"name": "Top", "invariant": ["d > a && c > 0"]}]})");
    const ClassDecl& top = *u.find_class("Top");
    // Mid is not specified, so nothing counts as inherited
    EXPECT_EQ(inherited_exposed(top, u, s), FieldSet{});
    EXPECT_EQ(body_fields(top, s, u), (std::vector<std::string>{"d", "c", "a"}));
    Diagnostics notes;
    plan_exposure(u, s, &notes);
    EXPECT_EQ(count_code(notes, "unspecified-superclass"), 2u);
}

TEST(Exposure, OwnFieldsOnlyBelowSpecifiedParent) {
    // every corpus class with a specified parent exposes exactly its own fields
    for (const auto& p : fault_free_programs()) {
        ExposurePlan plan = plan_exposure(p.unit, p.spec, nullptr);
        for (const auto& e : p.spec.entries) {
            const ClassDecl& c = *p.unit.find_class(e.class_name);
            FieldSet want = bound_vars(c);
            FieldSet f = invariant_free_vars(&e);
            want.insert(f.begin(), f.end());
            for (const auto& x : inherited_exposed(c, p.unit, p.spec)) want.erase(x);
            FieldSet got;
            for (const auto& g : plan.per_class.at(c.name).own_signatures) got.insert(g.field);
            EXPECT_EQ(got, want) << p.name << " " << c.name;
        }
    }
}

TEST(Exposure, VerifiedOnCorpus) {
    for (const auto& p : fault_free_programs()) {
        ExposurePlan plan = plan_exposure(p.unit, p.spec, nullptr);
        Diagnostics ds = verify_exposure(plan, p.unit, p.spec);
        EXPECT_FALSE(has_errors(ds)) << p.name << ": " << (ds.empty() ? "" : ds.front().format());
    }
}

TEST(Exposure, GapWhenAGetterIsMissing) {
    CorpusProgram p = load_dlist();
    ExposurePlan plan = plan_exposure(p.unit, p.spec, nullptr);
    plan.per_class.at("AbstractList").own_signatures.clear();
    Diagnostics ds = verify_exposure(plan, p.unit, p.spec);
    EXPECT_TRUE(has_code(ds, "exposure-gap"));
    EXPECT_FALSE(find_exposed_getter(plan, p.unit, p.spec, "DLinkedList", "size"));
}

TEST(Exposure, GapWhenAGetterHasTheWrongType) {
    CorpusProgram p = load_dlist();
    ExposurePlan plan = plan_exposure(p.unit, p.spec, nullptr);
    plan.per_class.at("AbstractList").own_signatures[0].type = TypeExpr::string_type();
    EXPECT_TRUE(has_code(verify_exposure(plan, p.unit, p.spec), "exposure-gap"));
}

TEST(Exposure, LookupFindsNearestOwner) {
    CorpusProgram p = load_corpus("counter");
    ExposurePlan plan = plan_exposure(p.unit, p.spec, nullptr);
    EXPECT_EQ(find_exposed_getter(plan, p.unit, p.spec, "Odometer", "value"), "Counter");
    EXPECT_EQ(find_exposed_getter(plan, p.unit, p.spec, "Odometer", "wraps"), "Odometer");
    EXPECT_EQ(find_exposed_getter(plan, p.unit, p.spec, "ModCounter", "wraps"), std::nullopt);
}

TEST(Exposure, HypothesisNoteWhenOwnFieldIsUnconstrained) {
    SourceUnit u = parse_unit(R"(
class A { protected int a; }
class B extends A { private int b; private int spare; }
)");
    InvariantSpec s = load_spec(R"({"classes": [
        {"name": "A", "invariant": ["a >= 0"]},
        {"name": "B", "invariant": ["b >= a"]}]})");
    ExposurePlan plan = plan_exposure(u, s, nullptr);
    Diagnostics ds = verify_exposure(plan, u, s);
    EXPECT_FALSE(has_errors(ds));
    EXPECT_TRUE(has_code(ds, "prop3-hypothesis"));
    FieldSet got;
    for (const auto& g : plan.per_class.at("B").own_signatures) got.insert(g.field);
    EXPECT_EQ(got, (FieldSet{"b", "spare"}));
}

TEST(Exposure, RandomHierarchiesAgreeWithOracles) {
    std::mt19937 rng(29);
    for (int i = 0; i < 200; ++i) {
        RandomHierarchy h = random_hierarchy(rng);
        ExposurePlan plan = plan_exposure(h.unit, h.spec, nullptr);
        auto a = check_inherited_sets(h, plan);
        auto b = check_own_fields_equation(h, plan);
        ASSERT_TRUE(a.empty()) << a.front() << "\n" << h.source << h.spec_json;
        ASSERT_TRUE(b.empty()) << b.front() << "\n" << h.source << h.spec_json;
        ASSERT_FALSE(has_errors(verify_exposure(plan, h.unit, h.spec)));
    }
}

TEST(Exposure, PartialSpecs) {
    std::mt19937 rng(31);
    for (int i = 0; i < 200; ++i) {
        RandomHierarchy h = random_hierarchy(rng, {.fully_specified = false});
        ExposurePlan plan = plan_exposure(h.unit, h.spec, nullptr);
        auto a = check_inherited_sets(h, plan);
        ASSERT_TRUE(a.empty()) << a.front() << "\n" << h.source << h.spec_json;
        Diagnostics ds = verify_exposure(plan, h.unit, h.spec);
        ASSERT_FALSE(has_errors(ds)) << ds.front().format() << "\n" << h.source << h.spec_json;
    }
}

// Exposure is by field name, so a field that hides an already exposed one
// gets no getter of its own. The gap is reported rather than woven.
TEST(Exposure, HiddenFieldsAreReportedAsGaps) {
    std::mt19937 rng(41);
    std::size_t gaps = 0;
    for (int i = 0; i < 300; ++i) {
        RandomHierarchy h = random_hierarchy(rng, {.fully_specified = false, .allow_hiding = true});
        ExposurePlan plan = plan_exposure(h.unit, h.spec, nullptr);
        for (const auto& d : verify_exposure(plan, h.unit, h.spec)) {
            if (d.severity != Severity::Error) continue;
            ASSERT_EQ(d.code, "exposure-gap") << d.format();
            ++gaps;
        }
        WeaveResult w = weave_program(h.unit, h.spec);
        EXPECT_EQ(w.artifacts.has_value(), !has_errors(w.diagnostics));
    }
    EXPECT_GT(gaps, 0u);
}

TEST(Oracles, DetectTamperedArtifacts) {
    std::mt19937 rng(37);
    RandomHierarchy h;
    do {
        h = random_hierarchy(rng);
    } while (h.depth < 2);
    WovenArtifacts a = weave_or_die(h.unit, h.spec);
    ASSERT_TRUE(check_interface_identity(h, a).empty());
    ASSERT_TRUE(check_getter_lookup(h, a).empty());
    ASSERT_TRUE(check_space_bound(h, a).empty());

    WovenArtifacts dropped = a;
    for (auto& i : dropped.interfaces)
        if (!i.methods.empty()) {
            i.methods.pop_back();
            break;
        }
    EXPECT_FALSE(check_interface_identity(h, dropped).empty());
    EXPECT_FALSE(check_getter_lookup(h, dropped).empty());

    WovenArtifacts retyped = a;
    for (auto& i : retyped.interfaces)
        if (!i.methods.empty()) {
            i.methods[0].return_type = TypeExpr::named("Cell", {*i.methods[0].return_type});
            break;
        }
    EXPECT_FALSE(check_interface_identity(h, retyped).empty());

    WovenArtifacts inflated = a;
    inflated.report.per_class.begin()->second.new_members += 1;
    inflated.report.max_chain_redundancy = inflated.report.formula_bound + 1;
    EXPECT_FALSE(check_space_bound(h, inflated).empty());
}
