/* trace.hpp -- finite-trace semantics for set-kind process graphs.
 *
 * The collapse rho maps a process to its prefix-closed set of traces:
 * terminating traces per Output branch, an unconditional divergent
 * marker at every node, and action-extended traces per Step branch.
 * Trace sets are kept two ways: bounded explicit sets (oracle-friendly)
 * and deterministic automata (exact); a consistency property ties them.
 */

#ifndef PROCITER_TRACE_HPP_
#define PROCITER_TRACE_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "prociter/graph.hpp"

namespace prociter {

struct Trace {
    std::vector<std::string> word;
    bool divergent = true;  // false: terminates in `output`
    std::string output;

    friend bool operator<(const Trace& a, const Trace& b) {
        if (a.word != b.word) return a.word < b.word;
        if (a.divergent != b.divergent) return a.divergent;  // divergent first
        return a.output < b.output;
    }
    friend bool operator==(const Trace& a, const Trace& b) {
        return a.word == b.word && a.divergent == b.divergent &&
               (a.divergent || a.output == b.output);
    }
};

struct TraceSet {
    std::set<Trace> traces;
    unsigned depth = 0;
};

struct TraceAutomaton {
    struct State {
        std::map<std::string, uint32_t> next;  // deterministic, partial
        std::set<std::string> outputs;
    };
    std::vector<std::string> actions;  // source action set
    std::vector<std::string> outputs;  // source output alphabet
    std::vector<State> states;
    uint32_t start = 0;
};

// The three-clause corecursion cut at `depth` (bounding the word length).
TraceSet traces_bounded(const ProcessGraph& g, StateId r, unsigned depth);

// Subset construction over the Step relation from {r}; the epi part of
// the trace map. Reachable-trimmed, BFS state numbering.
TraceAutomaton rho_trace_automaton(const ProcessGraph& g, StateId r);

// Language-plus-output equivalence of the two trace automata
// (Hopcroft-Karp style union-find product walk).
bool trace_equiv(const ProcessGraph& g1, StateId r1, const ProcessGraph& g2, StateId r2);
bool automata_equivalent(const TraceAutomaton& a, const TraceAutomaton& b);

// The section upsilon: one graph state per automaton state, the
// Brzozowski-derivative reading of a prefix-closed trace set.
ProcessGraph upsilon_determinize(const TraceAutomaton& aut);

// Depth-bounded language of an automaton, for the consistency property
// with traces_bounded.
TraceSet automaton_traces_bounded(const TraceAutomaton& aut, unsigned depth);

// One line per trace: "<word> => <output>" or "<word> => *", word "-"
// for the empty word, action names joined with '.', sorted.
std::string dump_trace_set(const TraceSet& ts);

// Mirrors the LTS dump with a "(d)" state prefix.
std::string dump_automaton(const TraceAutomaton& aut);

}  // namespace prociter

#endif
