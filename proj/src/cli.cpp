#include "moo/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "moo/interpreter.hpp"
#include "moo/parser.hpp"
#include "moo/printer.hpp"
#include "moo/spec.hpp"
#include "moo/typecheck.hpp"
#include "moo/weaver.hpp"

namespace moo::cli {

namespace fs = std::filesystem;

namespace {

struct IoError {
    std::string message;
};

struct Failed {
    int code;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError{"cannot read '" + path + "'"};
    std::ostringstream s;
    s << in.rdbuf();
    if (in.bad()) throw IoError{"error reading '" + path + "'"};
    return s.str();
}

void print(std::ostream& err, const Diagnostics& ds, const std::string& prefix = "") {
    for (const auto& d : ds) err << prefix << d.format() << "\n";
}

/// Parses and merges the sources, keeping at most one driver.
SourceUnit load_sources(const Config& config, std::ostream& err) {
    if (config.sources.empty() && !config.entry) {
        err << "error: no source files\n";
        throw Failed{Diagnosed};
    }
    std::vector<std::string> files = config.sources;
    if (config.entry && std::find(files.begin(), files.end(), *config.entry) == files.end())
        files.push_back(*config.entry);

    SourceUnit merged;
    std::vector<std::string> with_driver;
    bool failed = false;
    for (const auto& f : files) {
        std::string text = read_file(f);
        try {
            SourceUnit u = parse_unit(text);
            if (u.driver) {
                with_driver.push_back(f);
                if (config.entry && f != *config.entry) u.driver.reset();
            }
            merged = merge_units(std::move(merged), std::move(u));
        } catch (const CompileError& e) {
            print(err, e.diagnostics(), f + ":");
            failed = true;
        }
    }
    if (failed) throw Failed{Diagnosed};
    if (!config.entry && with_driver.size() > 1) {
        err << "error [multiple-drivers] driver blocks in";
        for (const auto& f : with_driver) err << " " << f;
        err << "; choose one with --entry\n";
        throw Failed{Diagnosed};
    }
    Diagnostics structure = check_structure(merged);
    print(err, structure);
    if (has_errors(structure)) throw Failed{Diagnosed};
    return merged;
}

InvariantSpec load_spec_file(const std::string& path, std::ostream& err) {
    std::string text = read_file(path);
    try {
        return load_spec(text);
    } catch (const CompileError& e) {
        print(err, e.diagnostics(), path + ": ");
        throw Failed{Diagnosed};
    }
}

WovenArtifacts weave(const Config& config, std::ostream& err) {
    SourceUnit unit = load_sources(config, err);
    InvariantSpec spec = load_spec_file(config.spec_path, err);
    WeaveOptions options;
    options.naive_inheritance = config.naive;
    WeaveResult r = weave_program(unit, spec, options);
    print(err, r.diagnostics);
    if (!r.artifacts) throw Failed{Diagnosed};
    return std::move(*r.artifacts);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError{"cannot write '" + path.string() + "'"};
    out << text;
    out.close();
    if (!out) throw IoError{"error writing '" + path.string() + "'"};
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error [io] " << e.message << "\n";
        return IoFailure;
    } catch (const Failed& f) {
        return f.code;
    } catch (const fs::filesystem_error& e) {
        err << "error [io] " << e.what() << "\n";
        return IoFailure;
    }
}

} // namespace

int cmd_weave(const Config& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        WovenArtifacts a = weave(config, err);
        fs::path dir(config.out_dir.empty() ? "." : config.out_dir);
        fs::create_directories(dir);
        std::size_t written = 0;
        for (const auto& i : a.interfaces) {
            write_file(dir / (i.name + ".moo"), render_interface(i));
            ++written;
        }
        for (const auto& c : a.exposed_classes) {
            write_file(dir / (c.name + ".moo"), render_class(c));
            ++written;
        }
        write_file(dir / (a.visitor.name + ".moo"), render_class(a.visitor));
        ++written;
        write_file(dir / "report.json", report_json(a.report));
        out << "wrote " << written << " declarations and report.json to " << dir.string() << "\n";
        return int{Success};
    });
}

int cmd_run(const Config& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        SourceUnit unit = load_sources(config, err);
        Diagnostics ds = typecheck_program(unit);
        print(err, ds);
        if (has_errors(ds)) return int{Diagnosed};
        ExecutionResult r = run_program(unit, config.trace);
        for (const auto& line : config.trace ? r.transcript : r.output) out << line << "\n";
        if (r.violation) {
            out << r.violation->format() << "\n";
            return int{Violation};
        }
        if (r.fault) {
            err << r.fault->format() << "\n";
            return int{Diagnosed};
        }
        return int{Success};
    });
}

int cmd_report(const Config& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        WovenArtifacts a = weave(config, err);
        const GenerationReport& r = a.report;
        for (const auto& [name, c] : r.per_class) {
            out << "class " << name << ": getters=" << c.getters << " wrappers=" << c.wrappers
                << " signatures=" << c.signatures << " new=" << c.new_members << " redundant=" << c.redundant
                << " chain_redundancy=" << c.chain_redundancy << " depth=" << c.depth << "\n";
        }
        out << "h = " << r.depth << "\n";
        out << "n = " << r.max_new_members << "\n";
        out << "formula_bound = " << r.formula_bound << "\n";
        out << "max_chain_redundancy = " << r.max_chain_redundancy << "\n";
        bool ok = r.within_bound();
        out << (ok ? "PASS" : "FAIL") << " measured " << r.max_chain_redundancy << (ok ? " <= " : " > ")
            << "bound " << r.formula_bound << "\n";
        return int{ok ? Success : Diagnosed};
    });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"MiniOO invariant weaver and interpreter", "moo"};
    app.require_subcommand(1);
    Config config;

    auto* weave_cmd = app.add_subcommand("weave", "generate exposure interfaces, exposed classes and the visitor");
    weave_cmd->add_option("--spec", config.spec_path, "invariant specification (JSON)")->required();
    weave_cmd->add_option("--out", config.out_dir, "output directory")->required();
    weave_cmd->add_flag("--naive", config.naive, "use the flawed exposed-extends-exposed scheme");
    weave_cmd->add_option("sources", config.sources, "MiniOO source files")->required();

    auto* run_cmd = app.add_subcommand("run", "execute the driver block");
    run_cmd->add_flag("--trace", config.trace, "interleave CHECK lines with program output");
    run_cmd->add_option("--entry", config.entry, "file whose driver runs");
    run_cmd->add_option("sources", config.sources, "MiniOO source files");

    auto* report_cmd = app.add_subcommand("report", "print the generated-member space report");
    report_cmd->add_option("--spec", config.spec_path, "invariant specification (JSON)")->required();
    report_cmd->add_option("sources", config.sources, "MiniOO source files")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error [usage] " << e.what() << "\n";
        return Diagnosed;
    }
    if (weave_cmd->parsed()) return cmd_weave(config, out, err);
    if (run_cmd->parsed()) return cmd_run(config, out, err);
    return cmd_report(config, out, err);
}

} // namespace moo::cli
