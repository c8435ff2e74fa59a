#include "prociter/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace prociter {

namespace {

bool branch_before(const GraphBranch& a, const GraphBranch& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.label != b.label) return a.label < b.label;
    if (a.target != b.target) return a.target < b.target;
    return Rational::cmp(a.weight, b.weight) < 0;
}

void require_same_signature(const ProcessGraph& a, const ProcessGraph& b, const char* who) {
    auto as_set = [](const std::vector<std::string>& v) {
        return std::set<std::string>(v.begin(), v.end());
    };
    if (a.effect != b.effect || as_set(a.actions) != as_set(b.actions) ||
        as_set(a.outputs) != as_set(b.outputs))
        throw std::invalid_argument(std::string(who) + ": signature mismatch");
}

}  // namespace

OneLayer make_layer(EffectKind effect, std::vector<GraphBranch> branches) {
    std::sort(branches.begin(), branches.end(), branch_before);
    std::vector<GraphBranch> merged;
    for (auto& br : branches) {
        if (effect == EffectKind::Set || effect == EffectKind::Maybe) br.weight = Rational(1);
        if (!merged.empty() && merged.back().kind == br.kind &&
            merged.back().label == br.label && merged.back().target == br.target) {
            if (effect == EffectKind::SubDist)
                merged.back().weight = merged.back().weight + br.weight;
            continue;  // idempotent union for Set/Maybe
        }
        if (effect == EffectKind::SubDist && br.weight.is_zero()) continue;
        merged.push_back(std::move(br));
    }
    if (effect == EffectKind::Maybe && merged.size() > 1)
        throw std::runtime_error("maybe layer with " + std::to_string(merged.size()) +
                                 " branches");
    if (effect == EffectKind::SubDist) {
        Rational sum(0);
        for (const auto& br : merged) sum = sum + br.weight;
        if (Rational(1) < sum)
            throw std::runtime_error("subdist layer weight sum " + sum.to_string() + " > 1");
    }
    return OneLayer{std::move(merged)};
}

Rational layer_weight_sum(const OneLayer& layer) {
    Rational sum(0);
    for (const auto& br : layer.branches) sum = sum + br.weight;
    return sum;
}

StateId ProcessGraph::root(const std::string& name) const {
    auto it = roots.find(name);
    if (it == roots.end()) throw std::invalid_argument("unknown root '" + name + "'");
    return it->second;
}

const OneLayer& out(const ProcessGraph& g, StateId s) {
    if (s >= g.layers.size()) throw std::invalid_argument("unknown state q" + std::to_string(s));
    return g.layers[s];
}

ProcessGraph map_outputs(const ProcessGraph& g, const std::map<std::string, std::string>& h) {
    ProcessGraph result = g;
    result.outputs.clear();
    for (const auto& name : g.outputs) {
        auto it = h.find(name);
        if (it == h.end())
            throw std::invalid_argument("map_outputs: no image for output '" + name + "'");
        if (std::find(result.outputs.begin(), result.outputs.end(), it->second) ==
            result.outputs.end())
            result.outputs.push_back(it->second);
    }
    for (auto& layer : result.layers) {
        std::vector<GraphBranch> branches = layer.branches;
        for (auto& br : branches)
            if (br.kind == GraphBranch::Kind::Output) br.label = h.at(br.label);
        layer = make_layer(g.effect, std::move(branches));
    }
    return result;
}

ProcessGraph kleisli_substitute(const ProcessGraph& g, const std::map<std::string, StateId>& bind,
                                const ProcessGraph& h) {
    if (g.effect != h.effect)
        throw std::invalid_argument("kleisli_substitute: effect kinds differ");
    if (bind.empty()) return g;  // eta-star is the identity
    for (const auto& [name, target] : bind) {
        if (std::find(g.outputs.begin(), g.outputs.end(), name) == g.outputs.end())
            throw std::invalid_argument("kleisli_substitute: '" + name + "' is not an output");
        if (target >= h.state_count())
            throw std::invalid_argument("kleisli_substitute: bind target out of range");
    }

    ProcessGraph result;
    result.effect = g.effect;
    result.actions = g.actions;
    for (const auto& a : h.actions)
        if (std::find(result.actions.begin(), result.actions.end(), a) == result.actions.end())
            result.actions.push_back(a);
    for (const auto& y : g.outputs)
        if (!bind.count(y)) result.outputs.push_back(y);
    for (const auto& z : h.outputs)
        if (std::find(result.outputs.begin(), result.outputs.end(), z) == result.outputs.end())
            result.outputs.push_back(z);

    const StateId offset = g.state_count();
    result.layers.reserve(g.state_count() + h.state_count());
    for (StateId s = 0; s < g.state_count(); ++s) {
        std::vector<GraphBranch> branches;
        for (const auto& br : g.layers[s].branches) {
            if (br.kind == GraphBranch::Kind::Output) {
                auto it = bind.find(br.label);
                if (it == bind.end()) {
                    branches.push_back(br);
                    continue;
                }
                for (const auto& sub : h.layers[it->second].branches) {
                    GraphBranch nb = sub;
                    nb.weight = br.weight * sub.weight;
                    if (nb.kind == GraphBranch::Kind::Step) nb.target += offset;
                    branches.push_back(std::move(nb));
                }
            } else {
                branches.push_back(br);
            }
        }
        result.layers.push_back(make_layer(result.effect, std::move(branches)));
    }
    for (StateId s = 0; s < h.state_count(); ++s) {
        std::vector<GraphBranch> branches = h.layers[s].branches;
        for (auto& br : branches)
            if (br.kind == GraphBranch::Kind::Step) br.target += offset;
        result.layers.push_back(make_layer(result.effect, std::move(branches)));
    }
    result.roots = g.roots;
    return result;
}

ProcessGraph restrict_outputs(const ProcessGraph& g, const std::vector<std::string>& keep) {
    std::set<std::string> wanted(keep.begin(), keep.end());
    for (const auto& layer : g.layers)
        for (const auto& br : layer.branches)
            if (br.kind == GraphBranch::Kind::Output && !wanted.count(br.label))
                throw std::invalid_argument("restrict_outputs: '" + br.label + "' still in use");
    ProcessGraph result = g;
    result.outputs.clear();
    for (const auto& name : g.outputs)
        if (wanted.count(name)) result.outputs.push_back(name);
    return result;
}

namespace {

// Disjoint-union view used by both bisimilar() and minimize().
struct UnionView {
    const ProcessGraph* g1;
    const ProcessGraph* g2;  // may equal g1 (minimize)
    StateId n1;

    StateId size() const { return n1 + g2->state_count(); }
    const OneLayer& layer(StateId s) const {
        return s < n1 ? g1->layers[s] : g2->layers[s - n1];
    }
    EffectKind effect() const { return g1->effect; }
};

using Partition = std::vector<unsigned>;

std::string output_signature(const UnionView& u, StateId s) {
    // Canonical per-state key: output names with aggregated weights.
    std::map<std::string, Rational> agg;
    for (const auto& br : u.layer(s).branches)
        if (br.kind == GraphBranch::Kind::Output) {
            auto [it, fresh] = agg.emplace(br.label, br.weight);
            if (!fresh) it->second = it->second + br.weight;
        }
    std::string key;
    for (const auto& [name, w] : agg) {
        key += name;
        key += '=';
        key += u.effect() == EffectKind::SubDist ? w.to_string() : "1";
        key += ';';
    }
    return key;
}

std::string step_signature(const UnionView& u, StateId s, const Partition& part) {
    // Targets are local to the state's own graph; shift into union indices.
    const StateId offset = s < u.n1 ? 0 : u.n1;
    std::map<std::pair<std::string, unsigned>, Rational> agg;
    for (const auto& br : u.layer(s).branches)
        if (br.kind == GraphBranch::Kind::Step) {
            auto key = std::make_pair(br.label, part[offset + br.target]);
            auto [it, fresh] = agg.emplace(key, br.weight);
            if (!fresh) it->second = it->second + br.weight;
        }
    std::string key;
    for (const auto& [ac, w] : agg) {
        key += ac.first;
        key += '#';
        key += std::to_string(ac.second);
        key += '=';
        key += u.effect() == EffectKind::SubDist ? w.to_string() : "1";
        key += ';';
    }
    return key;
}

// Moore-style refinement: round 0 groups by output signature, round k+1
// additionally by aggregated steps into round-k classes. The partition
// after round k identifies exactly the depth-k tree-bisimilar states.
Partition refine_to_fixpoint(const UnionView& u, StateId watch_a, StateId watch_b,
                             std::optional<unsigned>& separating_round) {
    const StateId n = u.size();
    if (n == 0) return {};
    Partition part(n, 0);
    {
        std::map<std::string, unsigned> classes;
        for (StateId s = 0; s < n; ++s) {
            auto key = output_signature(u, s);
            part[s] = classes.emplace(key, unsigned(classes.size())).first->second;
        }
        if (watch_a != watch_b && part[watch_a] != part[watch_b]) separating_round = 0;
    }
    for (unsigned round = 1; round <= n; ++round) {
        std::map<std::pair<unsigned, std::string>, unsigned> classes;
        Partition next(n, 0);
        for (StateId s = 0; s < n; ++s) {
            auto key = std::make_pair(part[s], step_signature(u, s, part));
            next[s] = classes.emplace(key, unsigned(classes.size())).first->second;
        }
        bool stable = classes.size() ==
                      size_t(*std::max_element(part.begin(), part.end()) + 1);
        part.swap(next);
        if (!separating_round && watch_a != watch_b && part[watch_a] != part[watch_b])
            separating_round = round;
        if (stable) break;
    }
    return part;
}

}  // namespace

BisimResult bisimilar(const ProcessGraph& g1, StateId r1, const ProcessGraph& g2, StateId r2) {
    require_same_signature(g1, g2, "bisimilar");
    if (r1 >= g1.state_count() || r2 >= g2.state_count())
        throw std::invalid_argument("bisimilar: root out of range");
    UnionView u{&g1, &g2, g1.state_count()};
    std::optional<unsigned> separating_round;
    BisimResult result;
    result.partition =
        refine_to_fixpoint(u, r1, u.n1 + r2, separating_round);
    result.related = result.partition[r1] == result.partition[u.n1 + r2];
    if (!result.related && separating_round)
        result.distinguishing_depth = *separating_round > 0 ? *separating_round - 1 : 0;
    return result;
}

ProcessGraph minimize(const ProcessGraph& g) {
    if (g.layers.empty()) return g;
    // View g as the right-hand component of a degenerate union.
    UnionView single{&g, &g, 0};
    std::optional<unsigned> unused;
    Partition part = refine_to_fixpoint(single, 0, 0, unused);

    // One representative layer per class, targets mapped to classes.
    unsigned class_count = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
    std::vector<std::optional<OneLayer>> class_layer(class_count);
    for (StateId s = 0; s < g.state_count(); ++s) {
        if (class_layer[part[s]]) continue;
        std::vector<GraphBranch> branches = g.layers[s].branches;
        for (auto& br : branches)
            if (br.kind == GraphBranch::Kind::Step) br.target = part[br.target];
        class_layer[part[s]] = make_layer(g.effect, std::move(branches));
    }

    // BFS from root classes in root-name order.
    std::vector<StateId> order;
    std::vector<int> renumber(class_count, -1);
    std::vector<unsigned> queue;
    auto visit = [&](unsigned cls) {
        if (renumber[cls] >= 0) return;
        renumber[cls] = int(order.size());
        order.push_back(cls);
        queue.push_back(cls);
    };
    for (const auto& [name, root] : g.roots) visit(part[root]);
    for (size_t i = 0; i < queue.size(); ++i)
        for (const auto& br : class_layer[queue[i]]->branches)
            if (br.kind == GraphBranch::Kind::Step) visit(unsigned(br.target));

    ProcessGraph result;
    result.effect = g.effect;
    result.actions = g.actions;
    result.outputs = g.outputs;
    result.layers.reserve(order.size());
    for (unsigned cls : order) {
        std::vector<GraphBranch> branches = class_layer[cls]->branches;
        for (auto& br : branches)
            if (br.kind == GraphBranch::Kind::Step) br.target = StateId(renumber[br.target]);
        result.layers.push_back(make_layer(g.effect, std::move(branches)));
    }
    for (const auto& [name, root] : g.roots)
        result.roots[name] = StateId(renumber[part[root]]);
    return result;
}

bool unfold_equal(const UnfoldPtr& a, const UnfoldPtr& b) {
    if (a->truncated != b->truncated) return false;
    if (a->truncated) return true;
    if (a->branches.size() != b->branches.size()) return false;
    for (size_t i = 0; i < a->branches.size(); ++i) {
        const auto& x = a->branches[i];
        const auto& y = b->branches[i];
        if (x.kind != y.kind || x.label != y.label || x.weight != y.weight) return false;
        if (x.kind == GraphBranch::Kind::Step && !unfold_equal(x.child, y.child)) return false;
    }
    return true;
}

std::string unfold_to_string(const UnfoldPtr& t) {
    if (t->truncated) return "^";
    std::string out = "{";
    for (size_t i = 0; i < t->branches.size(); ++i) {
        const auto& br = t->branches[i];
        if (i) out += ",";
        if (!br.weight.is_one()) out += br.weight.to_string() + ":";
        if (br.kind == GraphBranch::Kind::Output) out += br.label;
        else out += br.label + "." + unfold_to_string(br.child);
    }
    return out + "}";
}

UnfoldPtr bounded_unfold(const ProcessGraph& g, StateId r, unsigned depth) {
    if (depth == 0) return std::make_shared<const UnfoldTree>(UnfoldTree{true, {}});
    UnfoldTree node;
    for (const auto& br : out(g, r).branches) {
        UnfoldBranch ub{br.kind, br.label, br.weight, nullptr};
        if (br.kind == GraphBranch::Kind::Step) ub.child = bounded_unfold(g, br.target, depth - 1);
        node.branches.push_back(std::move(ub));
    }
    return std::make_shared<const UnfoldTree>(std::move(node));
}

std::string lts_dump(const ProcessGraph& g) {
    std::string outText;
    for (const auto& [name, root] : g.roots)
        outText += "root " + name + " = q" + std::to_string(root) + "\n";
    std::vector<std::string> lines;
    for (StateId s = 0; s < g.state_count(); ++s)
        for (const auto& br : g.layers[s].branches) {
            std::string line = "q" + std::to_string(s);
            if (br.kind == GraphBranch::Kind::Output) line += " => out " + br.label;
            else line += " --" + br.label + "--> q" + std::to_string(br.target);
            if (g.effect == EffectKind::SubDist) line += " [w=" + br.weight.to_string() + "]";
            lines.push_back(std::move(line));
        }
    std::sort(lines.begin(), lines.end());
    for (const auto& line : lines) outText += line + "\n";
    return outText;
}

}  // namespace prociter
