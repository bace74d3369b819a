#include "moo/spec.hpp"

#include <json.hpp>

#include "moo/hierarchy.hpp"
#include "moo/parser.hpp"
#include "moo/printer.hpp"
#include "moo/typecheck.hpp"

namespace moo {

const SpecEntry* InvariantSpec::find(std::string_view class_name) const {
    for (const auto& e : entries)
        if (e.class_name == class_name) return &e;
    return nullptr;
}

namespace {

[[noreturn]] void malformed(const std::string& msg) {
    throw CompileError(Diagnostic{"malformed-spec", msg, {}});
}

void only_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [k, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            malformed("unknown key '" + k + "' in " + where);
    }
}

} // namespace

InvariantSpec load_spec(std::string_view document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) malformed("top level must be an object");
    only_keys(doc, {"classes"}, "the top-level object");
    if (!doc.contains("classes") || !doc["classes"].is_array()) malformed("missing array 'classes'");

    InvariantSpec spec;
    Diagnostics errors;
    std::size_t idx = 0;
    for (const auto& entry : doc["classes"]) {
        std::string where = "classes[" + std::to_string(idx++) + "]";
        if (!entry.is_object()) malformed(where + " must be an object");
        only_keys(entry, {"name", "invariant"}, where);
        if (!entry.contains("name") || !entry["name"].is_string()) malformed(where + ": missing string 'name'");
        if (!entry.contains("invariant") || !entry["invariant"].is_array())
            malformed(where + ": missing array 'invariant'");

        SpecEntry e;
        e.class_name = entry["name"].get<std::string>();
        if (spec.find(e.class_name)) malformed("class '" + e.class_name + "' is specified twice");
        std::size_t k = 0;
        for (const auto& p : entry["invariant"]) {
            if (!p.is_string()) malformed(e.class_name + " invariant[" + std::to_string(k) + "] must be a string");
            try {
                e.predicates.push_back(Predicate{parse_predicate(p.get<std::string>())});
            } catch (const CompileError& err) {
                for (const auto& d : err.diagnostics())
                    errors.push_back(Diagnostic{"predicate-syntax",
                                                e.class_name + " invariant[" + std::to_string(k) + "] at " +
                                                    std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) +
                                                    ": " + d.message,
                                                d.pos});
            }
            ++k;
        }
        spec.entries.push_back(std::move(e));
    }
    if (!errors.empty()) throw CompileError(std::move(errors));
    return spec;
}

std::string serialize_spec(const InvariantSpec& spec) {
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& e : spec.entries) {
        nlohmann::ordered_json preds = nlohmann::ordered_json::array();
        for (const auto& p : e.predicates) preds.push_back(render_expr(p.expr));
        classes.push_back({{"name", e.class_name}, {"invariant", preds}});
    }
    nlohmann::ordered_json doc;
    doc["classes"] = classes;
    return doc.dump(2) + "\n";
}

Diagnostics validate_spec(const InvariantSpec& spec, const SourceUnit& unit) {
    Diagnostics out;
    TypeChecker checker(unit);
    for (const auto& entry : spec.entries) {
        const ClassDecl* cls = unit.find_class(entry.class_name);
        if (!cls) {
            out.push_back(Diagnostic{"unknown-class",
                                     "specified class '" + entry.class_name + "' is not declared", {}});
            continue;
        }
        for (std::size_t k = 0; k < entry.predicates.size(); ++k) {
            const Predicate& p = entry.predicates[k];
            std::string where = entry.class_name + " invariant[" + std::to_string(k) + "]";
            bool resolved = true;
            for (const auto& v : free_vars(p)) {
                if (!checker.table().find_field(cls->self_type(), v)) {
                    out.push_back(Diagnostic{"unknown-field",
                                             where + ": '" + v + "' is not a field of '" + entry.class_name +
                                                 "' or its superclasses",
                                             p.expr.pos});
                    resolved = false;
                }
            }
            if (!resolved) continue;

            TypeContext ctx;
            ctx.cls = cls;
            ctx.type_vars = cls->type_params;
            ctx.ignore_visibility = true;
            Diagnostics local;
            auto t = checker.type_of(p.expr, ctx, local);
            for (auto& d : local) {
                d.message = where + ": " + d.message;
                out.push_back(std::move(d));
            }
            if (t && !t->is_named("bool"))
                out.push_back(Diagnostic{"non-boolean-predicate",
                                         where + ": predicate has type '" + to_string(*t) + "', expected 'bool'",
                                         p.expr.pos});
        }
    }
    return out;
}

} // namespace moo
