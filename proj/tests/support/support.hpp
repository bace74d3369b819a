#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "moo/ast.hpp"
#include "moo/interpreter.hpp"
#include "moo/printer.hpp"
#include "moo/spec.hpp"
#include "moo/weaver.hpp"

namespace moo {
// readable gtest failure messages
inline void PrintTo(const TypeExpr& t, std::ostream* os) { *os << render_type(t); }
inline void PrintTo(const Expr& e, std::ostream* os) { *os << render_expr(e); }
} // namespace moo

namespace moo::testing {

std::filesystem::path corpus_dir();
std::filesystem::path golden_dir();
std::string read_file(const std::filesystem::path& p);

SourceUnit parse_files(const std::vector<std::filesystem::path>& files);

struct CorpusProgram {
    std::string name;
    std::vector<std::filesystem::path> files; // classes first, driver last
    std::filesystem::path spec_path;
    SourceUnit unit;
    InvariantSpec spec;
};

CorpusProgram load_program(const std::string& name, std::vector<std::filesystem::path> files,
                           std::filesystem::path spec_path);

/// `corpus/<name>/classes.moo` + `driver.moo` + `spec.json`.
CorpusProgram load_corpus(const std::string& name);

/// The correct doubly linked list with the testRemove driver.
CorpusProgram load_dlist(bool faulty = false);

/// Every fault-free corpus program.
std::vector<CorpusProgram> fault_free_programs();

/// Copy of `d` in which `new C<...>(...)` becomes `new ExposedC<...>(...)`
/// for every specified class C.
DriverBlock expose_driver(const DriverBlock& d, const WovenArtifacts& artifacts);

/// Original classes, generated declarations and the exposed driver.
SourceUnit woven_program(const SourceUnit& unit, const WovenArtifacts& artifacts);

/// Weaves or throws std::runtime_error listing the diagnostics.
WovenArtifacts weave_or_die(const SourceUnit& unit, const InvariantSpec& spec);

std::string joined(const std::vector<std::string>& lines);

} // namespace moo::testing
