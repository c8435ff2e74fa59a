#include "prociter/term.hpp"

#include <algorithm>
#include <stdexcept>

namespace prociter {

std::string to_string(EffectKind k) {
    switch (k) {
        case EffectKind::Set: return "set";
        case EffectKind::SubDist: return "subdist";
        case EffectKind::Maybe: return "maybe";
    }
    return "?";
}

TermPtr make_leaf(std::string name) {
    return std::make_shared<const Term>(Term{Leaf{std::move(name)}});
}

TermPtr make_prefix(std::string action, TermPtr body) {
    return std::make_shared<const Term>(Term{Prefix{std::move(action), std::move(body)}});
}

TermPtr make_choice(std::vector<TermBranch> branches) {
    return std::make_shared<const Term>(Term{Choice{std::move(branches)}});
}

TermPtr make_deadlock() { return make_choice({}); }

bool term_equal(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->node.index() != b->node.index()) return false;
    if (const auto* la = std::get_if<Leaf>(&a->node))
        return la->name == std::get<Leaf>(b->node).name;
    if (const auto* pa = std::get_if<Prefix>(&a->node)) {
        const auto& pb = std::get<Prefix>(b->node);
        return pa->action == pb.action && term_equal(pa->body, pb.body);
    }
    const auto& ca = std::get<Choice>(a->node);
    const auto& cb = std::get<Choice>(b->node);
    if (ca.branches.size() != cb.branches.size()) return false;
    for (size_t i = 0; i < ca.branches.size(); ++i)
        if (ca.branches[i].weight != cb.branches[i].weight ||
            !term_equal(ca.branches[i].term, cb.branches[i].term))
            return false;
    return true;
}

size_t term_hash(const TermPtr& t) {
    auto mix = [](size_t h, size_t v) { return (h ^ v) * 0x100000001b3ull + 0x9e37u; };
    size_t h = 0xcbf29ce484222325ull;
    if (const auto* l = std::get_if<Leaf>(&t->node)) {
        h = mix(h, 1);
        h = mix(h, std::hash<std::string>{}(l->name));
    } else if (const auto* p = std::get_if<Prefix>(&t->node)) {
        h = mix(h, 2);
        h = mix(h, std::hash<std::string>{}(p->action));
        h = mix(h, term_hash(p->body));
    } else {
        const auto& c = std::get<Choice>(t->node);
        h = mix(h, 3);
        for (const auto& br : c.branches) {
            h = mix(h, br.weight.hash());
            h = mix(h, term_hash(br.term));
        }
    }
    return h;
}

std::string term_to_string(const TermPtr& t) {
    if (const auto* l = std::get_if<Leaf>(&t->node)) return l->name;
    if (const auto* p = std::get_if<Prefix>(&t->node))
        return p->action + "." + term_to_string(p->body);
    const auto& c = std::get<Choice>(t->node);
    if (c.branches.empty()) return "0";
    std::string out = "{ ";
    for (size_t i = 0; i < c.branches.size(); ++i) {
        if (i) out += ", ";
        if (!c.branches[i].weight.is_one()) out += c.branches[i].weight.to_string() + ": ";
        out += term_to_string(c.branches[i].term);
    }
    return out + " }";
}

bool EquationSystem::is_var(const std::string& name) const {
    return std::find(vars.begin(), vars.end(), name) != vars.end();
}

bool EquationSystem::is_param(const std::string& name) const {
    return std::find(params.begin(), params.end(), name) != params.end();
}

bool EquationSystem::is_action(const std::string& name) const {
    return std::find(actions.begin(), actions.end(), name) != actions.end();
}

const TermPtr& EquationSystem::equation(const std::string& var) const {
    auto it = equations.find(var);
    if (it == equations.end()) throw std::invalid_argument("no equation for " + var);
    return it->second;
}

std::string print_system(const EquationSystem& sys) {
    std::string out = "effect " + to_string(sys.effect) + ";\n";
    out += "actions";
    for (size_t i = 0; i < sys.actions.size(); ++i)
        out += (i ? ", " : " ") + sys.actions[i];
    out += ";\n";
    if (!sys.params.empty()) {
        out += "params";
        for (size_t i = 0; i < sys.params.size(); ++i)
            out += (i ? ", " : " ") + sys.params[i];
        out += ";\n";
    }
    out += "vars";
    for (size_t i = 0; i < sys.vars.size(); ++i)
        out += (i ? ", " : " ") + sys.vars[i];
    out += ";\n";
    for (const auto& v : sys.vars)
        out += v + " = " + term_to_string(sys.equation(v)) + ";\n";
    return out;
}

namespace {

void validate_term(const EquationSystem& sys, const TermPtr& t, const std::string& path,
                   std::vector<std::string>& out) {
    if (const auto* l = std::get_if<Leaf>(&t->node)) {
        if (!sys.is_var(l->name) && !sys.is_param(l->name))
            out.push_back(path + ": undeclared name '" + l->name + "'");
        return;
    }
    if (const auto* p = std::get_if<Prefix>(&t->node)) {
        if (!sys.is_action(p->action))
            out.push_back(path + ": undeclared action '" + p->action + "'");
        validate_term(sys, p->body, path + "." + p->action, out);
        return;
    }
    const auto& c = std::get<Choice>(t->node);
    if (sys.effect == EffectKind::Maybe && c.branches.size() > 1)
        out.push_back(path + ": maybe choice with " + std::to_string(c.branches.size()) +
                      " branches");
    Rational sum(0);
    for (size_t i = 0; i < c.branches.size(); ++i) {
        const auto& br = c.branches[i];
        if (br.weight.negative()) out.push_back(path + ": negative weight");
        if (sys.effect != EffectKind::SubDist && !br.weight.is_one())
            out.push_back(path + ": weight on non-subdist branch");
        sum = sum + br.weight;
        validate_term(sys, br.term, path + "[" + std::to_string(i) + "]", out);
    }
    if (sys.effect == EffectKind::SubDist && Rational(1) < sum)
        out.push_back(path + ": weight sum " + sum.to_string() + " > 1");
}

}  // namespace

std::vector<std::string> validate(const EquationSystem& sys) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& a : sys.actions)
        if (!seen.insert(a).second) out.push_back("duplicate action '" + a + "'");
    for (const auto& p : sys.params)
        if (!seen.insert(p).second) out.push_back("duplicate name '" + p + "'");
    for (const auto& v : sys.vars)
        if (!seen.insert(v).second) out.push_back("duplicate name '" + v + "'");
    if (!sys.is_action(kTau)) out.push_back("action set lacks reserved 'tau'");
    for (const auto& v : sys.vars)
        if (!sys.equations.count(v)) out.push_back("missing equation for '" + v + "'");
    for (const auto& [v, t] : sys.equations) {
        if (!sys.is_var(v)) out.push_back("equation for undeclared var '" + v + "'");
        validate_term(sys, t, v, out);
    }
    return out;
}

TermPtr substitute_term(const TermPtr& t, const std::map<std::string, TermPtr>& binding) {
    if (const auto* l = std::get_if<Leaf>(&t->node)) {
        auto it = binding.find(l->name);
        return it == binding.end() ? t : it->second;
    }
    if (const auto* p = std::get_if<Prefix>(&t->node))
        return make_prefix(p->action, substitute_term(p->body, binding));
    const auto& c = std::get<Choice>(t->node);
    std::vector<TermBranch> out;
    out.reserve(c.branches.size());
    for (const auto& br : c.branches)
        out.push_back({br.weight, substitute_term(br.term, binding)});
    return make_choice(std::move(out));
}

namespace {

// Leaf renaming that leaves non-matching names alone; used by copair.
TermPtr rename_leaves(const TermPtr& t, const std::map<std::string, std::string>& ren) {
    std::map<std::string, TermPtr> binding;
    for (const auto& [from, to] : ren) binding[from] = make_leaf(to);
    return substitute_term(t, binding);
}

}  // namespace

EquationSystem copair(const EquationSystem& f, const EquationSystem& g) {
    if (f.effect != g.effect)
        throw std::invalid_argument("copair: effect kinds differ");
    EquationSystem out = f;
    for (const auto& a : g.actions)
        if (!out.is_action(a)) out.actions.push_back(a);
    for (const auto& p : g.params)
        if (!out.is_param(p)) out.params.push_back(p);

    std::set<std::string> taken(f.params.begin(), f.params.end());
    taken.insert(f.vars.begin(), f.vars.end());
    std::map<std::string, std::string> rename;
    for (const auto& v : g.vars) {
        std::string fresh = v;
        while (taken.count(fresh)) fresh += "'";
        taken.insert(fresh);
        if (fresh != v) rename[v] = fresh;
        out.vars.push_back(fresh);
    }
    for (const auto& v : g.vars) {
        const std::string& target = rename.count(v) ? rename.at(v) : v;
        out.equations[target] =
            rename.empty() ? g.equation(v) : rename_leaves(g.equation(v), rename);
    }
    return out;
}

}  // namespace prociter
