#include "moo/diagnostic.hpp"

#include <algorithm>

namespace moo {

std::string Diagnostic::format() const {
    std::string out;
    if (pos.line > 0) out += std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
    out += severity == Severity::Error ? "error" : "note";
    out += " [" + code + "] " + message;
    return out;
}

bool has_errors(const Diagnostics& ds) {
    return std::any_of(ds.begin(), ds.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool has_code(const Diagnostics& ds, std::string_view code) { return count_code(ds, code) > 0; }

std::size_t count_code(const Diagnostics& ds, std::string_view code) {
    return static_cast<std::size_t>(
        std::count_if(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

namespace {
std::string join_messages(const Diagnostics& ds) {
    std::string out;
    for (const auto& d : ds) {
        if (!out.empty()) out += "\n";
        out += d.format();
    }
    return out;
}
} // namespace

CompileError::CompileError(Diagnostics diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

} // namespace moo
