/* term.hpp -- finite syntax for systems of recursive process definitions.
 *
 * An EquationSystem presents a Kleisli morphism f : X -> T_Sigma(Y + X)
 * where Y = params, X = vars, and the effect kind picks T: finite
 * nondeterminism (Set), subdistributions (SubDist) or partiality (Maybe).
 * Terms are immutable trees; recursion happens only through Var leaves.
 */

#ifndef PROCITER_TERM_HPP_
#define PROCITER_TERM_HPP_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "prociter/rational.hpp"

namespace prociter {

enum class EffectKind { Set, SubDist, Maybe };

std::string to_string(EffectKind k);

inline const std::string kTau = "tau";

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Leaf {
    std::string name;
};

struct Prefix {
    std::string action;
    TermPtr body;
};

struct TermBranch {
    Rational weight;  // 1 and ignored for Set/Maybe
    TermPtr term;
};

struct Choice {
    std::vector<TermBranch> branches;  // empty = deadlock "0"
};

struct Term {
    std::variant<Leaf, Prefix, Choice> node;
};

TermPtr make_leaf(std::string name);
TermPtr make_prefix(std::string action, TermPtr body);
TermPtr make_choice(std::vector<TermBranch> branches);
TermPtr make_deadlock();

bool term_equal(const TermPtr& a, const TermPtr& b);
size_t term_hash(const TermPtr& t);
std::string term_to_string(const TermPtr& t);

struct EquationSystem {
    EffectKind effect = EffectKind::Set;
    std::vector<std::string> actions;  // declaration order; always contains "tau"
    std::vector<std::string> params;   // Y
    std::vector<std::string> vars;     // X, equation order
    std::map<std::string, TermPtr> equations;

    bool is_var(const std::string& name) const;
    bool is_param(const std::string& name) const;
    bool is_action(const std::string& name) const;
    const TermPtr& equation(const std::string& var) const;
};

// The summand sigma against which guardedness is claimed: a set of
// declared names (defaults to all vars elsewhere).
struct Summand {
    std::set<std::string> names;
};

std::string print_system(const EquationSystem& sys);

// Every invariant violation, with a path into the offending term;
// empty means the system is well formed.
std::vector<std::string> validate(const EquationSystem& sys);

// Union of two systems over disjoint var sets (rule (par)); g's vars are
// alpha-renamed with a prime suffix when they collide with f's.
// Throws std::invalid_argument on effect-kind mismatch.
EquationSystem copair(const EquationSystem& f, const EquationSystem& g);

// Syntactic Kleisli composition: replaces every leaf naming a key of
// `binding` by the bound term. Names not bound pass through.
TermPtr substitute_term(const TermPtr& t, const std::map<std::string, TermPtr>& binding);

}  // namespace prociter

#endif
