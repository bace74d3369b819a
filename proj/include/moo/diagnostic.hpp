#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "moo/ast.hpp"

namespace moo {

enum class Severity { Error, Note };

/// A positioned message from any pipeline stage. `code` is a stable
/// kebab-case identifier (`type-mismatch`, `exposure-gap`, ...) that tests
/// and the CLI match on; `message` is for humans.
struct Diagnostic {
    std::string code;
    std::string message;
    SourcePos pos;
    Severity severity = Severity::Error;

    std::string format() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& ds);
bool has_code(const Diagnostics& ds, std::string_view code);
std::size_t count_code(const Diagnostics& ds, std::string_view code);

/// Thrown by stages that cannot produce a result (parsing, spec loading).
class CompileError : public std::runtime_error {
public:
    explicit CompileError(Diagnostics diags);
    explicit CompileError(Diagnostic diag) : CompileError(Diagnostics{std::move(diag)}) {}

    const Diagnostics& diagnostics() const { return diags_; }

private:
    Diagnostics diags_;
};

} // namespace moo
