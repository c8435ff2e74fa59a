/* solve.hpp -- solution operators for recursive process definitions.
 *
 * solve_unique: unique guarded solutions by coiteration, unrolled to a
 *   rational graph construction (states = vars + shared subterm
 *   positions, guarded Var leaves become back edges).
 * epsilon_closure + solve_elgot: least-fixpoint elimination of bare
 *   top-level Var references, then unique solving.
 * solve_banach / solve_kleene: the step-counting and maybe-monad
 *   iteration sequences, with the retraction rho/upsilon between them.
 */

#ifndef PROCITER_SOLVE_HPP_
#define PROCITER_SOLVE_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "prociter/graph.hpp"
#include "prociter/guard.hpp"
#include "prociter/term.hpp"

namespace prociter {

class GuardednessError : public std::runtime_error {
public:
    explicit GuardednessError(GuardReport report)
        : std::runtime_error("guardedness violation: " + format_report(report)),
          report(std::move(report)) {}
    GuardReport report;
};

struct SolveTrace {
    unsigned iterations = 0;
    std::map<std::string, unsigned> stabilized_at;
};

struct Solution {
    ProcessGraph graph;
    SolveTrace trace;
};

// The graph of f itself: every leaf (param or var) becomes an Output, so
// the result presents f : X -> T_Sigma(Y + X) with outputs Y + X.
ProcessGraph literal_graph(const EquationSystem& f);

// Graph of a bare family of rows over an explicit output alphabet; one
// root per row, every leaf an Output. Leaves must name the alphabet (or
// another row, when that row's name is part of the alphabet).
ProcessGraph term_graph(EffectKind effect, const std::vector<std::string>& actions,
                        const std::vector<std::string>& alphabet,
                        const std::vector<std::pair<std::string, TermPtr>>& rows);

// Unique solution of a guarded system; mode must be Vacuous or
// ActionGuarded. Throws GuardednessError when check_guarded fails.
Solution solve_unique(const EquationSystem& f, const GuardMode& mode);

// Least-fixpoint elimination of top-level bare Var leaves (Set/Maybe
// only; pure reference cycles collapse to the empty choice). The result
// is ActionGuarded with guards = all actions; idempotent.
EquationSystem epsilon_closure(const EquationSystem& f);

// Elgot solution: closure then unique coiteration. Total mode, so no
// guardedness precondition.
ProcessGraph solve_elgot(const EquationSystem& f);

// Iteration operator on graph-presented morphisms: given g whose outputs
// include dom(bind), ties every bound Output back through the layer of
// its bound state. With elgot=false the bound states' layers must be
// free of bound outputs (guarded splice); with elgot=true bound-output
// references among them are closed by least fixpoint first (Set/Maybe).
ProcessGraph iterate_graph(const ProcessGraph& g, const std::map<std::string, StateId>& bind,
                           bool elgot);

// --- step-counting and maybe instances ---------------------------------

struct StepValue {
    bool infinite = true;
    std::string output;
    uint64_t steps = 0;

    static StepValue inf() { return {}; }
    static StepValue done(std::string output, uint64_t steps) {
        return {false, std::move(output), steps};
    }
    friend bool operator==(const StepValue& a, const StepValue& b) {
        if (a.infinite != b.infinite) return false;
        return a.infinite || (a.output == b.output && a.steps == b.steps);
    }
};

struct FlatValue {
    bool bottom = true;
    std::string output;

    static FlatValue bot() { return {}; }
    static FlatValue done(std::string output) { return {false, std::move(output)}; }
    friend bool operator==(const FlatValue& a, const FlatValue& b) {
        return a.bottom == b.bottom && (a.bottom || a.output == b.output);
    }
};

struct StepRow {
    bool infinite = false;
    std::string target;  // var or out name
    uint64_t steps = 0;
};

struct StepSystem {
    std::vector<std::string> vars;
    std::vector<std::string> outs;
    std::map<std::string, StepRow> table;

    bool is_var(const std::string& name) const;
};

struct FlatRow {
    bool bottom = false;
    std::string target;
};

struct FlatSystem {
    std::vector<std::string> vars;
    std::vector<std::string> outs;
    std::map<std::string, FlatRow> table;
};

struct StepsSolution {
    std::map<std::string, StepValue> values;
    SolveTrace trace;
};

// Banach iteration W_0 = infinity, W_{n+1} = [eta,W_n]* f, run to exact
// pointwise stabilization. Requires StepPositive guardedness (a row
// targeting a var must take at least one step).
StepsSolution solve_banach(const StepSystem& f, bool parallel_rows = false);

// Kleene iteration from bottom; total, cycles resolve to Bottom.
std::map<std::string, FlatValue> solve_kleene(const FlatSystem& f, bool parallel_rows = false,
                                              SolveTrace* trace = nullptr);

// The retraction rho(a, k) = a, rho(inf) = bottom and its section
// upsilon(a) = (a, 1), upsilon(bottom) = inf.
FlatValue rho_steps(const StepValue& v);
StepValue upsilon_steps(const FlatValue& v);
StepSystem upsilon_system(const FlatSystem& f);
FlatSystem rho_system(const StepSystem& f);

// Output reachability: the iterated-out collapse at the countable
// powerset instance. Set kind only.
std::set<std::string> rho_outputs(const ProcessGraph& g, StateId r);

// Does `solution` satisfy the fixpoint identity for f, up to
// bisimilarity root by root?
bool check_fixpoint(const EquationSystem& f, const ProcessGraph& solution);

// Text format: `steps; vars x1,x2; outs y; x1 -> x2 @ 1; x2 -> inf;`
StepSystem parse_step_system(const std::string& text);
std::string dump_step_values(const std::map<std::string, StepValue>& values);
std::string dump_flat_values(const std::map<std::string, FlatValue>& values);
std::string dump_trace(const SolveTrace& trace);

}  // namespace prociter

#endif
