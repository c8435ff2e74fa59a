#include "prociter/guard.hpp"

#include <stdexcept>

namespace prociter {

GuardMode GuardMode::action_guarded_all(const EquationSystem& sys) {
    return action_guarded({sys.actions.begin(), sys.actions.end()});
}

GuardMode GuardMode::visible_guarded(const EquationSystem& sys) {
    std::set<std::string> guards(sys.actions.begin(), sys.actions.end());
    guards.erase(kTau);
    return action_guarded(std::move(guards));
}

std::string GuardMode::describe() const {
    switch (kind) {
        case Kind::Vacuous: return "vacuous";
        case Kind::ActionGuarded: {
            std::string out = "action{";
            bool first = true;
            for (const auto& g : guards) {
                if (!first) out += ",";
                out += g;
                first = false;
            }
            return out + "}";
        }
        case Kind::StepPositive: return "step";
        case Kind::Total: return "total";
    }
    return "?";
}

namespace {

void walk(const EquationSystem& sys, const GuardMode& mode, const Summand& sigma,
          const std::string& var, const TermPtr& t, const std::string& path, bool guarded_above,
          GuardReport& report) {
    if (const auto* l = std::get_if<Leaf>(&t->node)) {
        if (!sigma.names.count(l->name)) return;
        bool ok = false;
        switch (mode.kind) {
            case GuardMode::Kind::Vacuous: ok = false; break;
            case GuardMode::Kind::ActionGuarded:
            case GuardMode::Kind::StepPositive: ok = guarded_above; break;
            case GuardMode::Kind::Total: ok = true; break;
        }
        if (!ok) report.violations.push_back({var, path, l->name});
        return;
    }
    if (const auto* p = std::get_if<Prefix>(&t->node)) {
        bool guards_here = mode.kind == GuardMode::Kind::StepPositive ||
                           (mode.kind == GuardMode::Kind::ActionGuarded &&
                            mode.guards.count(p->action));
        walk(sys, mode, sigma, var, p->body, path + "." + p->action,
             guarded_above || guards_here, report);
        return;
    }
    const auto& c = std::get<Choice>(t->node);
    for (size_t i = 0; i < c.branches.size(); ++i)
        walk(sys, mode, sigma, var, c.branches[i].term, path + "[" + std::to_string(i) + "]",
             guarded_above, report);
}

}  // namespace

GuardReport check_guarded(const EquationSystem& f, const Summand& sigma, const GuardMode& mode) {
    for (const auto& name : sigma.names)
        if (!f.is_var(name) && !f.is_param(name))
            throw std::invalid_argument("check_guarded: unknown sigma name '" + name + "'");
    GuardReport report;
    for (const auto& v : f.vars)
        walk(f, mode, sigma, v, f.equation(v), v, false, report);
    report.guarded = report.violations.empty();
    return report;
}

Summand weaken(const Summand& sigma, const Summand& subset) {
    for (const auto& name : subset.names)
        if (!sigma.names.count(name))
            throw std::invalid_argument("weaken: '" + name + "' not contained in sigma");
    return subset;
}

std::string format_report(const GuardReport& report) {
    if (report.guarded) return "guarded\n";
    std::string out;
    for (const auto& v : report.violations)
        out += "violation: " + v.var + " at " + v.path + " leaf " + v.leaf + "\n";
    return out;
}

}  // namespace prociter
