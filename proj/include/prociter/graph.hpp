/* graph.hpp -- finite rational process graphs.
 *
 * A ProcessGraph presents an element of nu gamma. T(X + A x gamma) per
 * root: the stored layer of a state is exactly `out`, and building a
 * graph from layers is out-inverse (Lambek). Branch lists are kept
 * canonical: sorted, with duplicates merged according to the effect
 * kind, so structural equality is semantic equality of layers.
 */

#ifndef PROCITER_GRAPH_HPP_
#define PROCITER_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prociter/term.hpp"

namespace prociter {

using StateId = uint32_t;

struct GraphBranch {
    enum class Kind { Output, Step };
    Kind kind;
    std::string label;  // output name, or action name for steps
    StateId target = 0; // steps only
    Rational weight{1};

    friend bool operator==(const GraphBranch& a, const GraphBranch& b) {
        return a.kind == b.kind && a.label == b.label && a.target == b.target &&
               a.weight == b.weight;
    }
};

struct OneLayer {
    std::vector<GraphBranch> branches;

    friend bool operator==(const OneLayer& a, const OneLayer& b) {
        return a.branches == b.branches;
    }
};

// Sorts branches and merges duplicates: idempotently for Set, adding
// weights for SubDist. Throws on Maybe layers with more than one branch
// and on SubDist layers whose weight sum exceeds 1.
OneLayer make_layer(EffectKind effect, std::vector<GraphBranch> branches);

Rational layer_weight_sum(const OneLayer& layer);

struct ProcessGraph {
    EffectKind effect = EffectKind::Set;
    std::vector<std::string> actions;
    std::vector<std::string> outputs;
    std::vector<OneLayer> layers;
    std::map<std::string, StateId> roots;

    StateId state_count() const { return StateId(layers.size()); }
    StateId root(const std::string& name) const;

    friend bool operator==(const ProcessGraph& a, const ProcessGraph& b) {
        return a.effect == b.effect && a.actions == b.actions && a.outputs == b.outputs &&
               a.layers == b.layers && a.roots == b.roots;
    }
};

// The coalgebra structure map; total on declared states.
const OneLayer& out(const ProcessGraph& g, StateId s);

// Functorial renaming of output leaves; `h` must be total on g.outputs.
// May collapse outputs (layers are re-canonicalized).
ProcessGraph map_outputs(const ProcessGraph& g, const std::map<std::string, std::string>& h);

// One-layer Kleisli substitution: every Output(y) branch with y bound is
// replaced in-layer by the branches of out(bind(y)) in h, sharing h's
// states; SubDist weights multiply. Unbound outputs pass through.
ProcessGraph kleisli_substitute(const ProcessGraph& g,
                                const std::map<std::string, StateId>& bind,
                                const ProcessGraph& h);

// Narrows the declared output alphabet to `keep`; throws if a layer
// still mentions a dropped name.
ProcessGraph restrict_outputs(const ProcessGraph& g, const std::vector<std::string>& keep);

struct BisimResult {
    bool related = false;
    // Depth of the unfolding-tree node where behaviours first differ;
    // absent when related.
    std::optional<unsigned> distinguishing_depth;
    // Class index per state of the disjoint union (g1 states first).
    std::vector<unsigned> partition;
};

// Strong (probabilistic, for SubDist) bisimilarity by Moore-style
// partition refinement on the disjoint union. Requires equal effect
// kind, action set and output set.
BisimResult bisimilar(const ProcessGraph& g1, StateId r1, const ProcessGraph& g2, StateId r2);

// Canonical quotient: bisimilarity classes, unreachable states trimmed,
// breadth-first renumbering from roots in name order. Idempotent.
ProcessGraph minimize(const ProcessGraph& g);

// Finite approximant of the final-coalgebra element rooted at r.
struct UnfoldTree;
using UnfoldPtr = std::shared_ptr<const UnfoldTree>;

struct UnfoldBranch {
    GraphBranch::Kind kind;
    std::string label;
    Rational weight{1};
    UnfoldPtr child;  // steps only
};

struct UnfoldTree {
    bool truncated = false;  // distinct from a deadlock (empty) layer
    std::vector<UnfoldBranch> branches;
};

bool unfold_equal(const UnfoldPtr& a, const UnfoldPtr& b);
std::string unfold_to_string(const UnfoldPtr& t);
UnfoldPtr bounded_unfold(const ProcessGraph& g, StateId r, unsigned depth);

// Deterministic textual dump: root lines (sorted by name), then branch
// lines sorted lexicographically. Weights shown for SubDist only.
std::string lts_dump(const ProcessGraph& g);

}  // namespace prociter

#endif
