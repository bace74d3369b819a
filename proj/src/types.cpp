#include "moo/types.hpp"

#include <algorithm>

namespace moo {

TypeSubstitution::TypeSubstitution(std::initializer_list<std::pair<std::string, TypeExpr>> bindings) {
    for (const auto& [v, t] : bindings) bind(v, t);
}

TypeSubstitution TypeSubstitution::from_lists(const std::vector<std::string>& params,
                                              const std::vector<TypeExpr>& args) {
    if (params.size() != args.size())
        throw std::invalid_argument("substitution arity mismatch");
    TypeSubstitution s;
    for (std::size_t i = 0; i < params.size(); ++i) s.bind(params[i], args[i]);
    return s;
}

void TypeSubstitution::bind(std::string var, TypeExpr image) {
    if (lookup(var)) throw std::invalid_argument("type variable '" + var + "' bound twice");
    bindings_.emplace_back(std::move(var), std::move(image));
}

const TypeExpr* TypeSubstitution::lookup(std::string_view var) const {
    for (const auto& [v, t] : bindings_)
        if (v == var) return &t;
    return nullptr;
}

TypeExpr substitute(const TypeSubstitution& subst, const TypeExpr& t) {
    if (t.is_var()) {
        if (const TypeExpr* image = subst.lookup(t.name)) return *image;
        return t;
    }
    TypeExpr out = TypeExpr::named(t.name);
    out.args.reserve(t.args.size());
    for (const auto& a : t.args) out.args.push_back(substitute(subst, a));
    return out;
}

TypeSubstitution compose(const TypeSubstitution& outer, const TypeSubstitution& inner) {
    TypeSubstitution out;
    for (const auto& [v, t] : inner.bindings()) out.bind(v, substitute(outer, t));
    for (const auto& [v, t] : outer.bindings())
        if (!inner.lookup(v)) out.bind(v, t);
    return out;
}

TypeExpr apply_chain(const std::vector<TypeSubstitution>& chain, const TypeExpr& t) {
    TypeExpr out = t;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) out = substitute(*it, out);
    return out;
}

namespace {
void collect_vars(const TypeExpr& t, std::set<std::string>& out) {
    if (t.is_var()) {
        out.insert(t.name);
        return;
    }
    for (const auto& a : t.args) collect_vars(a, out);
}
} // namespace

std::set<std::string> free_type_vars(const TypeExpr& t) {
    std::set<std::string> out;
    collect_vars(t, out);
    return out;
}

std::string NameSupply::fresh(const std::string& base) {
    if (preserve_ && reserved_.insert(base).second) return base;
    while (true) {
        std::string candidate = base + "_X" + std::to_string(++counter_);
        if (!reserved_.count(candidate)) {
            reserved_.insert(candidate);
            return candidate;
        }
    }
}

RenamedType alpha_rename(const std::vector<std::string>& params, const TypeExpr& t, NameSupply& supply) {
    std::set<std::string> free = free_type_vars(t);
    for (const auto& p : params) free.erase(p);

    RenamedType out;
    TypeSubstitution renaming;
    for (const auto& p : params) {
        std::string n = supply.fresh(p);
        if (free.count(n))
            throw NameCollision("fresh name '" + n + "' captures a free variable");
        if (std::find(out.params.begin(), out.params.end(), n) != out.params.end())
            throw NameCollision("fresh name '" + n + "' supplied twice");
        out.params.push_back(n);
        renaming.bind(p, TypeExpr::var(n));
    }
    out.type = substitute(renaming, t);
    return out;
}

RenamedType alpha_normalize(const std::vector<std::string>& params, const TypeExpr& t) {
    RenamedType out;
    TypeSubstitution renaming;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::string n = "#" + std::to_string(i);
        out.params.push_back(n);
        renaming.bind(params[i], TypeExpr::var(n));
    }
    out.type = substitute(renaming, t);
    return out;
}

bool alpha_equivalent(const std::vector<std::string>& p1, const TypeExpr& t1,
                      const std::vector<std::string>& p2, const TypeExpr& t2) {
    if (p1.size() != p2.size()) return false;
    RenamedType a = alpha_normalize(p1, t1);
    RenamedType b = alpha_normalize(p2, t2);
    return a.type == b.type;
}

} // namespace moo
