#pragma once

/// @file cli.hpp
/// @brief The `moo` command line: weave, run and report over sets of `.moo` files.
///
/// Exit codes: 0 success, 1 diagnostics (static errors, runtime faults,
/// failed space check), 2 I/O failure, 3 invariant violation.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace moo::cli {

enum ExitCode : int { Success = 0, Diagnosed = 1, IoFailure = 2, Violation = 3 };

struct Config {
    std::vector<std::string> sources;
    std::string spec_path;
    std::string out_dir;
    std::optional<std::string> entry; // file whose driver runs when several carry one
    bool trace = false;
    bool naive = false; // weave with the flawed exposed-extends-exposed scheme
};

int cmd_weave(const Config& config, std::ostream& out, std::ostream& err);
int cmd_run(const Config& config, std::ostream& out, std::ostream& err);
int cmd_report(const Config& config, std::ostream& out, std::ostream& err);

/// Parses `args` (program name first) and dispatches to a command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace moo::cli
