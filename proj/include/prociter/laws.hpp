/* laws.hpp -- randomized checking of the iteration laws and theorems.
 *
 * Every trial is a pure function of (seed, trial index), so runs replay
 * deterministically and trials may execute in parallel without changing
 * any verdict. Equality is always up to bisimilarity for solution
 * graphs, exact for flat values, language equality for automata.
 */

#ifndef PROCITER_LAWS_HPP_
#define PROCITER_LAWS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prociter/guard.hpp"
#include "prociter/solve.hpp"
#include "prociter/term.hpp"
#include "prociter/trace.hpp"

namespace prociter {

// splitmix64; stable across platforms, unlike <random> distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}
    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }
    bool chance(unsigned num, unsigned den) { return below(den) < num; }

private:
    uint64_t state_;
};

Rng trial_rng(uint64_t seed, unsigned trial);

struct GenParams {
    uint64_t seed = 1;
    unsigned max_vars = 3;
    unsigned max_params = 3;
    unsigned max_actions = 2;
    unsigned max_depth = 3;
    unsigned max_branching = 3;
    EffectKind effect = EffectKind::Set;
    // Vacuous / ActionGuarded / Total; for ActionGuarded an empty guard
    // set means "all actions of the generated system".
    GuardMode mode = GuardMode::action_guarded({});
    unsigned trials = 200;
    bool parallel = false;
};

// Deterministic in (seed, trial); guarded generation inserts a guard
// prefix above every var leaf, vacuous generation places none.
EquationSystem gen_system(const GenParams& p, unsigned trial);

struct LawFailure {
    unsigned trial = 0;
    std::string detail;
};

struct LawVerdict {
    std::string law;
    unsigned trials = 0;
    std::vector<LawFailure> failures;
    bool passed() const { return failures.empty(); }
};

std::string format_verdict(const LawVerdict& v, bool with_details = true);

// Deliberately broken transformations, one per law, used as negative
// controls by the acceptance suite.
enum class Sabotage { None, Injected };

LawVerdict law_fixpoint(const GenParams& p, Sabotage sabotage = Sabotage::None);
LawVerdict law_naturality(const GenParams& p, Sabotage sabotage = Sabotage::None);
LawVerdict law_codiagonal(const GenParams& p, Sabotage sabotage = Sabotage::None);
LawVerdict law_uniformity(const GenParams& p, Sabotage sabotage = Sabotage::None);
LawVerdict law_dinaturality(const GenParams& p, Sabotage sabotage = Sabotage::None);
LawVerdict law_bekic(const GenParams& p, Sabotage sabotage = Sabotage::None);

// Retraction suite: (A) output collapse of solutions vs least-fixpoint
// closure of the collapsed system, (B) trace collapse vs the direct
// trace-level solution (NFA with epsilon moves through var leaves),
// plus the rho-upsilon round trip at the trace level.
LawVerdict check_retraction_elgot(const GenParams& p, Sabotage sabotage = Sabotage::None);

// Step instance: Banach/Kleene coincidence, the iteration-congruence
// perturbation test, and identity (rho (upsilon rho f)-dagger =
// rho f-dagger).
LawVerdict check_retraction_steps(const GenParams& p, Sabotage sabotage = Sabotage::None);

// --- delay-monad instance -----------------------------------------------

struct DelayValue {
    bool never = true;
    std::string output;
    uint64_t steps = 0;

    static DelayValue make_never() { return {}; }
    static DelayValue done(std::string output, uint64_t steps) {
        return {false, std::move(output), steps};
    }
    friend bool operator==(const DelayValue& a, const DelayValue& b) {
        if (a.never != b.never) return false;
        return a.never || (a.output == b.output && a.steps == b.steps);
    }
};

struct DelayDelayValue {
    bool never_outer = true;
    uint64_t outer_steps = 0;
    DelayValue inner;

    static DelayDelayValue make_never() { return {}; }
    static DelayDelayValue outer(uint64_t steps, DelayValue inner) {
        return {false, steps, std::move(inner)};
    }
};

DelayValue delay_eta(const std::string& output);
DelayValue delay_triangle(const DelayValue& v);  // one extra delay step
DelayValue delay_bmu(const DelayDelayValue& v);  // flatten, adding steps

FlatValue rho_delay(const DelayValue& v);

// The nu-algebra axioms for rho on the delay instance: rho . eta = id,
// rho . triangle = rho (delay cancellation), rho . bmu = rho . inner-rho.
// Exhaustive for steps <= 4, then p.trials random larger values.
LawVerdict check_nu_algebra(const GenParams& p, Sabotage sabotage = Sabotage::None);

// Sampled, never-asserted reports on the trace-level conjectures
// (upsilon as a monad morphism; the determinization effect).
std::string report_trace_conjectures(const GenParams& p);

// Generators for the step instance, shared with the acceptance suite.
FlatSystem gen_flat_system(const GenParams& p, unsigned trial);
StepSystem gen_step_system(const GenParams& p, unsigned trial);

// Solver used by the law runners: unique for Vacuous/ActionGuarded
// modes, Elgot for Total.
ProcessGraph solve_for_mode(const EquationSystem& sys, const GuardMode& mode);

// Runs fn over p.trials trials (OpenMP-parallel when p.parallel and
// available); failure order is by trial index either way.
LawVerdict run_trials(const std::string& law, const GenParams& p,
                      const std::function<std::optional<std::string>(unsigned)>& fn);

}  // namespace prociter

#endif
