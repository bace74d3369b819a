#include "random_hierarchy.hpp"

#include <sstream>

#include "moo/parser.hpp"
#include "moo/printer.hpp"

namespace moo::testing {

const GeneratedClass* RandomHierarchy::find(const std::string& name) const {
    for (const auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

std::size_t pick(std::mt19937& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

TypeExpr random_type(std::mt19937& rng, const std::vector<std::string>& params, int nesting = 1) {
    std::size_t k = pick(rng, 0, params.empty() ? 3 : 5);
    switch (k) {
    case 0: return TypeExpr::int_type();
    case 1: return TypeExpr::string_type();
    case 2: return TypeExpr::bool_type();
    case 3:
        if (nesting > 0) return TypeExpr::named("Cell", {random_type(rng, params, nesting - 1)});
        return TypeExpr::int_type();
    default: return TypeExpr::var(params[pick(rng, 0, params.size() - 1)]);
    }
}

std::string predicate_for(const std::string& field, const TypeExpr& t) {
    if (t.is_named("int")) return field + " >= 0 || " + field + " < 0";
    if (t.is_named("bool")) return field + " || !" + field;
    return field + " == " + field;
}

std::vector<std::string> visible_fields(const std::vector<GeneratedClass>& cs, const GeneratedClass& c) {
    std::vector<std::string> out;
    for (const GeneratedClass* k = &c; k;) {
        for (const auto& f : k->fields) out.push_back(f.first);
        const GeneratedClass* next = nullptr;
        for (const auto& x : cs)
            if (x.name == k->parent) next = &x;
        k = next;
    }
    return out;
}

TypeExpr field_type_on_chain(const std::vector<GeneratedClass>& cs, const GeneratedClass& c, const std::string& f) {
    for (const GeneratedClass* k = &c; k;) {
        for (const auto& x : k->fields)
            if (x.first == f) return x.second;
        const GeneratedClass* next = nullptr;
        for (const auto& x : cs)
            if (x.name == k->parent) next = &x;
        k = next;
    }
    return TypeExpr::int_type();
}

} // namespace

RandomHierarchy random_hierarchy(std::mt19937& rng, const RandomHierarchyOptions& options) {
    static const char* const param_pool[] = {"T", "U", "K", "S"};
    RandomHierarchy h;
    std::size_t count = pick(rng, 2, std::max<std::size_t>(2, options.max_classes));
    std::map<std::string, std::set<std::string>> protected_methods;

    for (std::size_t i = 0; i < count; ++i) {
        GeneratedClass c;
        c.name = "C" + std::to_string(i);
        if (i > 0 && !chance(rng, 0.15)) {
            std::vector<std::size_t> eligible;
            for (std::size_t j = 0; j < i; ++j)
                if (h.classes[j].depth < options.max_depth) eligible.push_back(j);
            if (!eligible.empty()) {
                // lean towards the newest class so that deep chains show up
                std::size_t j = chance(rng, 0.6) ? eligible.back() : eligible[pick(rng, 0, eligible.size() - 1)];
                c.parent = h.classes[j].name;
                c.depth = h.classes[j].depth + 1;
            }
        }
        if (options.generic) {
            std::size_t np = pick(rng, 0, 2);
            std::size_t start = pick(rng, 0, 3);
            for (std::size_t k = 0; k < np; ++k) c.params.push_back(param_pool[(start + k) % 4]);
        }
        if (!c.parent.empty()) {
            const GeneratedClass* p = h.find(c.parent);
            for (std::size_t k = 0; k < p->params.size(); ++k) c.parent_args.push_back(random_type(rng, c.params));
        }

        std::size_t members = pick(rng, 1, options.max_members);
        std::size_t nfields = pick(rng, 1, members);
        std::vector<std::string> inherited = c.parent.empty() ? std::vector<std::string>{}
                                                              : visible_fields(h.classes, *h.find(c.parent));
        for (std::size_t k = 0; k < nfields; ++k) {
            std::string name = "f" + std::to_string(i) + "_" + std::to_string(k);
            if (options.allow_hiding && !inherited.empty() && chance(rng, 0.1))
                name = inherited[pick(rng, 0, inherited.size() - 1)];
            bool dup = false;
            for (const auto& f : c.fields) dup = dup || f.first == name;
            if (dup) name = "f" + std::to_string(i) + "_" + std::to_string(k);
            c.fields.emplace_back(name, random_type(rng, c.params));
        }
        for (std::size_t k = nfields; k < members; ++k) {
            std::size_t m = pick(rng, 0, 7);
            if (m < 6) c.public_methods.insert("m" + std::to_string(m));
            else protected_methods[c.name].insert("p" + std::to_string(m));
        }

        c.specified = options.fully_specified || chance(rng, 0.6);
        if (c.specified) {
            for (const auto& f : c.fields) c.predicate_fields.insert(f.first);
            if (!inherited.empty() && chance(rng, 0.5)) c.predicate_fields.insert(inherited[pick(rng, 0, inherited.size() - 1)]);
        }
        h.classes.push_back(std::move(c));
    }

    std::ostringstream src;
    src << "class Cell<E> {\n    public E item;\n}\n";
    std::ostringstream spec;
    spec << "{\"classes\": [";
    bool first_entry = true;
    for (auto& c : h.classes) {
        h.depth = std::max(h.depth, c.depth);
        src << "\nclass " << c.name;
        if (!c.params.empty()) {
            src << "<";
            for (std::size_t k = 0; k < c.params.size(); ++k) src << (k ? ", " : "") << c.params[k];
            src << ">";
        }
        if (!c.parent.empty()) {
            TypeExpr sup = TypeExpr::named(c.parent, c.parent_args);
            src << " extends " << render_type(sup);
        }
        src << " {\n";
        static const char* const vis[] = {"private", "protected", "public"};
        std::size_t v = 0;
        for (const auto& f : c.fields) src << "    " << vis[v++ % 3] << " " << render_type(f.second) << " " << f.first << ";\n";
        auto emit = [&](const std::string& vis_word, const std::string& name) {
            src << "\n    " << vis_word << " int " << name << "() {\n        return " << name.substr(1) << ";\n    }\n";
        };
        for (const auto& m : c.public_methods) emit("public", m);
        for (const auto& m : protected_methods[c.name]) emit("protected", m);
        src << "}\n";

        if (c.specified) {
            spec << (first_entry ? "" : ", ") << "{\"name\": \"" << c.name << "\", \"invariant\": [";
            bool first = true;
            for (const auto& f : c.predicate_fields) {
                spec << (first ? "" : ", ") << "\"" << predicate_for(f, field_type_on_chain(h.classes, c, f)) << "\"";
                first = false;
            }
            spec << "]}";
            first_entry = false;
        }
    }
    spec << "]}\n";
    h.source = src.str();
    h.spec_json = spec.str();
    h.unit = parse_unit(h.source);
    h.spec = load_spec(h.spec_json);
    return h;
}

} // namespace moo::testing
