#include "prociter/trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace prociter {

namespace {

void require_set_kind(const ProcessGraph& g, const char* who) {
    if (g.effect != EffectKind::Set)
        throw std::invalid_argument(std::string(who) + ": requires the set instance");
}

void collect(const ProcessGraph& g, StateId s, unsigned depth, std::vector<std::string>& word,
             TraceSet& out) {
    out.traces.insert({word, true, ""});  // the unconditional divergent clause
    for (const auto& br : g.layers[s].branches) {
        if (br.kind == GraphBranch::Kind::Output) {
            out.traces.insert({word, false, br.label});
        } else if (depth > 0) {
            word.push_back(br.label);
            collect(g, br.target, depth - 1, word, out);
            word.pop_back();
        }
    }
}

}  // namespace

TraceSet traces_bounded(const ProcessGraph& g, StateId r, unsigned depth) {
    require_set_kind(g, "traces_bounded");
    if (r >= g.state_count()) throw std::invalid_argument("traces_bounded: state out of range");
    TraceSet out;
    out.depth = depth;
    std::vector<std::string> word;
    collect(g, r, depth, word, out);
    return out;
}

TraceAutomaton rho_trace_automaton(const ProcessGraph& g, StateId r) {
    require_set_kind(g, "rho_trace_automaton");
    if (r >= g.state_count())
        throw std::invalid_argument("rho_trace_automaton: state out of range");

    TraceAutomaton aut;
    aut.actions = g.actions;
    aut.outputs = g.outputs;

    std::vector<std::string> letters = g.actions;
    std::sort(letters.begin(), letters.end());

    std::map<std::set<StateId>, uint32_t> ids;
    std::vector<std::set<StateId>> worklist;
    auto intern = [&](const std::set<StateId>& subset) {
        auto [it, fresh] = ids.emplace(subset, uint32_t(ids.size()));
        if (fresh) {
            worklist.push_back(subset);
            aut.states.emplace_back();
        }
        return it->second;
    };

    aut.start = intern({r});
    for (size_t i = 0; i < worklist.size(); ++i) {
        std::set<StateId> subset = worklist[i];
        TraceAutomaton::State& st = aut.states[i];
        for (StateId s : subset)
            for (const auto& br : g.layers[s].branches)
                if (br.kind == GraphBranch::Kind::Output) st.outputs.insert(br.label);
        for (const auto& a : letters) {
            std::set<StateId> next;
            for (StateId s : subset)
                for (const auto& br : g.layers[s].branches)
                    if (br.kind == GraphBranch::Kind::Step && br.label == a)
                        next.insert(br.target);
            if (next.empty()) continue;
            uint32_t target = intern(next);
            aut.states[i].next[a] = target;  // aut.states may have reallocated; st is stale
        }
    }
    return aut;
}

bool automata_equivalent(const TraceAutomaton& a, const TraceAutomaton& b) {
    // Hopcroft-Karp: merge reached pairs with union-find; a mismatch in
    // outputs or defined letters splits the languages (every present
    // letter contributes at least the divergent continuation).
    const size_t n = a.states.size();
    std::vector<uint32_t> parent(n + b.states.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = uint32_t(i);
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::vector<std::pair<uint32_t, uint32_t>> stack{{a.start, uint32_t(n) + b.start}};
    parent[find(a.start)] = find(uint32_t(n) + b.start);
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const auto& sx = a.states[x];
        const auto& sy = b.states[y - n];
        if (sx.outputs != sy.outputs) return false;
        auto ix = sx.next.begin();
        auto iy = sy.next.begin();
        while (ix != sx.next.end() || iy != sy.next.end()) {
            if (ix == sx.next.end() || iy == sy.next.end() || ix->first != iy->first)
                return false;  // letter defined on one side only
            uint32_t rx = find(ix->second);
            uint32_t ry = find(uint32_t(n) + iy->second);
            if (rx != ry) {
                parent[rx] = ry;
                stack.push_back({ix->second, uint32_t(n) + iy->second});
            }
            ++ix;
            ++iy;
        }
    }
    return true;
}

bool trace_equiv(const ProcessGraph& g1, StateId r1, const ProcessGraph& g2, StateId r2) {
    auto as_set = [](const std::vector<std::string>& v) {
        return std::set<std::string>(v.begin(), v.end());
    };
    if (g1.effect != g2.effect || as_set(g1.actions) != as_set(g2.actions) ||
        as_set(g1.outputs) != as_set(g2.outputs))
        throw std::invalid_argument("trace_equiv: signature mismatch");
    return automata_equivalent(rho_trace_automaton(g1, r1), rho_trace_automaton(g2, r2));
}

ProcessGraph upsilon_determinize(const TraceAutomaton& aut) {
    ProcessGraph g;
    g.effect = EffectKind::Set;
    g.actions = aut.actions;
    g.outputs = aut.outputs;
    g.layers.reserve(aut.states.size());
    for (const auto& st : aut.states) {
        std::vector<GraphBranch> branches;
        for (const auto& name : st.outputs)
            branches.push_back({GraphBranch::Kind::Output, name, 0, Rational(1)});
        for (const auto& [a, target] : st.next)
            branches.push_back({GraphBranch::Kind::Step, a, target, Rational(1)});
        g.layers.push_back(make_layer(g.effect, std::move(branches)));
    }
    g.roots["start"] = aut.start;
    return g;
}

TraceSet automaton_traces_bounded(const TraceAutomaton& aut, unsigned depth) {
    TraceSet out;
    out.depth = depth;
    struct Item {
        uint32_t state;
        std::vector<std::string> word;
    };
    std::vector<Item> stack{{aut.start, {}}};
    while (!stack.empty()) {
        Item item = std::move(stack.back());
        stack.pop_back();
        out.traces.insert({item.word, true, ""});
        for (const auto& name : aut.states[item.state].outputs)
            out.traces.insert({item.word, false, name});
        if (item.word.size() < depth)
            for (const auto& [a, target] : aut.states[item.state].next) {
                Item next{target, item.word};
                next.word.push_back(a);
                stack.push_back(std::move(next));
            }
    }
    return out;
}

namespace {

std::string word_text(const std::vector<std::string>& word) {
    if (word.empty()) return "-";
    std::string out;
    for (size_t i = 0; i < word.size(); ++i) out += (i ? "." : "") + word[i];
    return out;
}

}  // namespace

std::string dump_trace_set(const TraceSet& ts) {
    std::vector<std::string> lines;
    for (const auto& t : ts.traces)
        lines.push_back(word_text(t.word) + " => " + (t.divergent ? "*" : t.output));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& line : lines) out += line + "\n";
    return out;
}

std::string dump_automaton(const TraceAutomaton& aut) {
    std::string out = "root = d" + std::to_string(aut.start) + "\n";
    std::vector<std::string> lines;
    for (size_t s = 0; s < aut.states.size(); ++s) {
        for (const auto& name : aut.states[s].outputs)
            lines.push_back("d" + std::to_string(s) + " => out " + name);
        for (const auto& [a, target] : aut.states[s].next)
            lines.push_back("d" + std::to_string(s) + " --" + a + "--> d" +
                            std::to_string(target));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& line : lines) out += line + "\n";
    return out;
}

}  // namespace prociter
