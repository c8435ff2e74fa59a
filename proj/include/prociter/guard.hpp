/* guard.hpp -- deciding sigma-guardedness of equation systems.
 *
 * A sigma-leaf occurrence passes when the mode's notion of guard sits
 * strictly above it on the path from its equation root; a system is
 * sigma-guarded when every occurrence passes.
 */

#ifndef PROCITER_GUARD_HPP_
#define PROCITER_GUARD_HPP_

#include <set>
#include <string>
#include <vector>

#include "prociter/term.hpp"

namespace prociter {

struct GuardMode {
    enum class Kind { Vacuous, ActionGuarded, StepPositive, Total };
    Kind kind = Kind::Total;
    std::set<std::string> guards;  // ActionGuarded only

    static GuardMode vacuous() { return {Kind::Vacuous, {}}; }
    static GuardMode action_guarded(std::set<std::string> guards) {
        return {Kind::ActionGuarded, std::move(guards)};
    }
    // Every declared action counts as a guard (the discipline used by
    // epsilon-closed systems).
    static GuardMode action_guarded_all(const EquationSystem& sys);
    // Only the visible actions guard; tau does not.
    static GuardMode visible_guarded(const EquationSystem& sys);
    static GuardMode step_positive() { return {Kind::StepPositive, {}}; }
    static GuardMode total() { return {Kind::Total, {}}; }

    std::string describe() const;
};

struct GuardViolation {
    std::string var;
    std::string path;  // into the equation's term, e.g. "x[1].a[0]"
    std::string leaf;
};

struct GuardReport {
    bool guarded = true;
    std::vector<GuardViolation> violations;
};

// Throws std::invalid_argument when sigma names something undeclared.
GuardReport check_guarded(const EquationSystem& f, const Summand& sigma, const GuardMode& mode);

inline Summand all_vars(const EquationSystem& f) {
    return Summand{{f.vars.begin(), f.vars.end()}};
}

// Rule (wkn): returns subset unchanged; throws when subset is not
// contained in sigma.
Summand weaken(const Summand& sigma, const Summand& subset);

std::string format_report(const GuardReport& report);

}  // namespace prociter

#endif
