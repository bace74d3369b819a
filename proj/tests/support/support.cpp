#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "moo/parser.hpp"

#ifndef MOO_CORPUS_DIR
#error "MOO_CORPUS_DIR must be defined"
#endif

namespace moo::testing {

namespace fs = std::filesystem;

fs::path corpus_dir() { return fs::path(MOO_CORPUS_DIR); }
fs::path golden_dir() { return fs::path(MOO_GOLDEN_DIR); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

SourceUnit parse_files(const std::vector<fs::path>& files) {
    SourceUnit u;
    for (const auto& f : files) u = merge_units(std::move(u), parse_unit(read_file(f)));
    return u;
}

CorpusProgram load_program(const std::string& name, std::vector<fs::path> files, fs::path spec_path) {
    CorpusProgram p;
    p.name = name;
    p.unit = parse_files(files);
    p.spec = load_spec(read_file(spec_path));
    p.files = std::move(files);
    p.spec_path = std::move(spec_path);
    return p;
}

CorpusProgram load_corpus(const std::string& name) {
    fs::path d = corpus_dir() / name;
    return load_program(name, {d / "classes.moo", d / "driver.moo"}, d / "spec.json");
}

CorpusProgram load_dlist(bool faulty) {
    fs::path d = corpus_dir() / "dlist";
    return load_program(faulty ? "dlist-faulty" : "dlist",
                        {d / "list.moo", d / (faulty ? "dlinkedlist_faulty.moo" : "dlinkedlist.moo"),
                         d / "test_remove.moo"},
                        d / "spec.json");
}

std::vector<CorpusProgram> fault_free_programs() {
    std::vector<CorpusProgram> out;
    out.push_back(load_dlist(false));
    for (const char* n : {"account", "shapes", "stack", "queue", "counter", "sortedlist", "interval", "boxes",
                          "bst", "thermostat", "chain8"})
        out.push_back(load_corpus(n));
    return out;
}

namespace {

void expose(Expr& e, const WovenArtifacts& a);

void expose(Block& b, const WovenArtifacts& a);

void expose(Stmt& s, const WovenArtifacts& a) {
    std::visit(
        [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LocalDecl>) {
                if (n.init) expose(*n.init, a);
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                expose(n.target, a);
                expose(n.value, a);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                expose(n.cond, a);
                expose(n.then_branch, a);
                if (n.else_branch) expose(*n.else_branch, a);
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                expose(n.cond, a);
                expose(n.body, a);
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                if (n.value) expose(*n.value, a);
            } else if constexpr (std::is_same_v<T, ExprStmt> || std::is_same_v<T, PrintStmt>) {
                if constexpr (std::is_same_v<T, ExprStmt>) expose(n.expr, a);
                else expose(n.value, a);
            } else if constexpr (std::is_same_v<T, SuperCtorStmt>) {
                for (auto& x : n.args) expose(x, a);
            }
        },
        s.node);
}

void expose(Block& b, const WovenArtifacts& a) {
    for (auto& s : b) expose(s, a);
}

void expose(Expr& e, const WovenArtifacts& a) {
    std::visit(
        [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NewExpr>) {
                for (auto& x : n.args) expose(x, a);
                if (const ExposureRecord* r = a.record_for(n.type.name)) n.type.name = r->class_name;
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                expose(*n.object, a);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                if (n.receiver) expose(**n.receiver, a);
                for (auto& x : n.args) expose(x, a);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                expose(*n.lhs, a);
                expose(*n.rhs, a);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                expose(*n.operand, a);
            } else if constexpr (std::is_same_v<T, IntrinsicExpr>) {
                for (auto& x : n.args) expose(x, a);
            }
        },
        e.node);
}

} // namespace

DriverBlock expose_driver(const DriverBlock& d, const WovenArtifacts& artifacts) {
    DriverBlock out = d;
    expose(out.body, artifacts);
    return out;
}

SourceUnit woven_program(const SourceUnit& unit, const WovenArtifacts& artifacts) {
    SourceUnit classes = unit;
    classes.driver.reset();
    SourceUnit merged = merge_units(std::move(classes), artifacts.as_unit());
    if (unit.driver) merged.driver = expose_driver(*unit.driver, artifacts);
    return merged;
}

WovenArtifacts weave_or_die(const SourceUnit& unit, const InvariantSpec& spec) {
    WeaveResult r = weave_program(unit, spec);
    if (!r.artifacts) {
        std::string msg = "weave failed:";
        for (const auto& d : r.diagnostics) msg += "\n  " + d.format();
        throw std::runtime_error(msg);
    }
    return std::move(*r.artifacts);
}

std::string joined(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

} // namespace moo::testing
