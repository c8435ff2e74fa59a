#include "prociter/solve.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prociter {

namespace {

// Shared graph builder for literal_graph and solve_unique. Var states
// come first (one per var, never merged); subterm states are shared by
// structural hashing, allocated in discovery order.
class GraphBuilder {
public:
    GraphBuilder(const EquationSystem& sys, bool literal) : sys_(sys), literal_(literal) {
        graph_.effect = sys.effect;
        graph_.actions = sys.actions;
        graph_.outputs = sys.params;
        if (literal_)
            for (const auto& v : sys.vars)
                if (std::find(graph_.outputs.begin(), graph_.outputs.end(), v) ==
                    graph_.outputs.end())
                    graph_.outputs.push_back(v);
        if (!literal_) {
            for (const auto& v : sys_.vars) {
                var_state_[v] = graph_.state_count();
                graph_.layers.emplace_back();
            }
        }
    }

    ProcessGraph build() {
        if (literal_) {
            for (const auto& v : sys_.vars) {
                StateId s = graph_.state_count();
                graph_.layers.emplace_back();
                var_state_[v] = s;
                pending_.push_back({s, sys_.equation(v)});
            }
            drain(/*literal_leaves=*/true);
        } else {
            // Phase A: equation tops. Bare Var leaves here are exactly the
            // unguarded occurrences and have been rejected up front.
            std::vector<std::pair<StateId, TermPtr>> tops;
            for (const auto& v : sys_.vars) tops.push_back({var_state_[v], sys_.equation(v)});
            for (auto& [state, term] : tops) {
                std::vector<GraphBranch> branches;
                flatten(term, Rational(1), /*splice_vars=*/false, branches);
                graph_.layers[state] = make_layer(sys_.effect, std::move(branches));
            }
            // Phase B: subterm states may reference var tops via bare Var
            // leaves; those splice the now-known top layers in one step.
            drain(/*literal_leaves=*/false);
        }
        for (const auto& v : sys_.vars) graph_.roots[v] = var_state_[v];
        return std::move(graph_);
    }

private:
    void drain(bool literal_leaves) {
        while (!pending_.empty()) {
            auto [state, term] = pending_.front();
            pending_.erase(pending_.begin());
            std::vector<GraphBranch> branches;
            if (literal_leaves)
                flatten_literal(term, Rational(1), branches);
            else
                flatten(term, Rational(1), /*splice_vars=*/true, branches);
            graph_.layers[state] = make_layer(sys_.effect, std::move(branches));
        }
    }

    void flatten_literal(const TermPtr& t, const Rational& w, std::vector<GraphBranch>& out) {
        if (const auto* l = std::get_if<Leaf>(&t->node)) {
            out.push_back({GraphBranch::Kind::Output, l->name, 0, w});
            return;
        }
        if (const auto* p = std::get_if<Prefix>(&t->node)) {
            out.push_back({GraphBranch::Kind::Step, p->action, subterm_state(p->body), w});
            return;
        }
        for (const auto& br : std::get<Choice>(t->node).branches)
            flatten_literal(br.term, w * br.weight, out);
    }

    void flatten(const TermPtr& t, const Rational& w, bool splice_vars,
                 std::vector<GraphBranch>& out) {
        if (const auto* l = std::get_if<Leaf>(&t->node)) {
            if (sys_.is_param(l->name)) {
                out.push_back({GraphBranch::Kind::Output, l->name, 0, w});
                return;
            }
            if (!splice_vars)
                throw std::logic_error("solve_unique: unguarded var '" + l->name +
                                       "' survived the guard check");
            // Guarded occurrence inside a prefix body: splice the var's
            // (already computed) top layer.
            for (const auto& br : graph_.layers[var_state_.at(l->name)].branches) {
                GraphBranch nb = br;
                nb.weight = w * br.weight;
                out.push_back(std::move(nb));
            }
            return;
        }
        if (const auto* p = std::get_if<Prefix>(&t->node)) {
            StateId target;
            const auto* body_leaf = std::get_if<Leaf>(&p->body->node);
            if (body_leaf && sys_.is_var(body_leaf->name))
                target = var_state_.at(body_leaf->name);  // back edge
            else
                target = subterm_state(p->body);
            out.push_back({GraphBranch::Kind::Step, p->action, target, w});
            return;
        }
        for (const auto& br : std::get<Choice>(t->node).branches)
            flatten(br.term, w * br.weight, splice_vars, out);
    }

    StateId subterm_state(const TermPtr& t) {
        size_t h = term_hash(t);
        for (const auto& [cand, state] : memo_[h])
            if (term_equal(cand, t)) return state;
        StateId s = graph_.state_count();
        graph_.layers.emplace_back();
        memo_[h].push_back({t, s});
        pending_.push_back({s, t});
        return s;
    }

    const EquationSystem& sys_;
    bool literal_;
    ProcessGraph graph_;
    std::map<std::string, StateId> var_state_;
    std::unordered_map<size_t, std::vector<std::pair<TermPtr, StateId>>> memo_;
    std::vector<std::pair<StateId, TermPtr>> pending_;
};

}  // namespace

ProcessGraph literal_graph(const EquationSystem& f) {
    return GraphBuilder(f, /*literal=*/true).build();
}

ProcessGraph term_graph(EffectKind effect, const std::vector<std::string>& actions,
                        const std::vector<std::string>& alphabet,
                        const std::vector<std::pair<std::string, TermPtr>>& rows) {
    EquationSystem fab;
    fab.effect = effect;
    fab.actions = actions;
    fab.params = alphabet;
    for (const auto& [name, term] : rows) {
        fab.vars.push_back(name);
        fab.equations[name] = term;
    }
    return restrict_outputs(literal_graph(fab), alphabet);
}

Solution solve_unique(const EquationSystem& f, const GuardMode& mode) {
    if (mode.kind != GuardMode::Kind::Vacuous && mode.kind != GuardMode::Kind::ActionGuarded)
        throw std::invalid_argument("solve_unique: mode must be vacuous or action-guarded");
    GuardReport report = check_guarded(f, all_vars(f), mode);
    if (!report.guarded) throw GuardednessError(std::move(report));

    Solution result;
    result.graph = GraphBuilder(f, /*literal=*/false).build();
    result.trace.iterations = 0;  // coiteration has no approximation sequence
    for (const auto& v : f.vars) result.trace.stabilized_at[v] = 0;
    return result;
}

namespace {

// Top-level structure of an equation: bare Var references and the
// remaining (guard-headed or param) branches, choice nesting flattened.
void split_top(const EquationSystem& sys, const TermPtr& t, std::vector<std::string>& refs,
               std::vector<TermPtr>& items) {
    if (const auto* l = std::get_if<Leaf>(&t->node)) {
        if (sys.is_var(l->name)) refs.push_back(l->name);
        else items.push_back(t);
        return;
    }
    if (std::holds_alternative<Prefix>(t->node)) {
        items.push_back(t);
        return;
    }
    for (const auto& br : std::get<Choice>(t->node).branches)
        split_top(sys, br.term, refs, items);
}

}  // namespace

EquationSystem epsilon_closure(const EquationSystem& f) {
    if (f.effect == EffectKind::SubDist)
        throw std::invalid_argument(
            "epsilon_closure: unguarded subdistribution iteration is not supported");

    std::map<std::string, std::vector<std::string>> refs;
    std::map<std::string, std::vector<TermPtr>> items;
    for (const auto& v : f.vars) split_top(f, f.equation(v), refs[v], items[v]);

    EquationSystem out = f;
    for (const auto& v : f.vars) {
        // Reachable vars through bare references, v first, then discovery
        // order; their non-Var branches form the least fixpoint.
        std::vector<std::string> reach{v};
        std::set<std::string> seen{v};
        for (size_t i = 0; i < reach.size(); ++i)
            for (const auto& r : refs[reach[i]])
                if (seen.insert(r).second) reach.push_back(r);

        std::vector<TermBranch> branches;
        for (const auto& z : reach)
            for (const auto& item : items[z]) {
                bool dup = false;
                for (const auto& have : branches)
                    if (term_equal(have.term, item)) dup = true;
                if (!dup) branches.push_back({Rational(1), item});
            }
        out.equations[v] = make_choice(std::move(branches));
    }
    return out;
}

ProcessGraph solve_elgot(const EquationSystem& f) {
    EquationSystem closed = epsilon_closure(f);
    return solve_unique(closed, GuardMode::action_guarded_all(closed)).graph;
}

ProcessGraph iterate_graph(const ProcessGraph& g, const std::map<std::string, StateId>& bind,
                           bool elgot) {
    for (const auto& [name, state] : bind) {
        if (std::find(g.outputs.begin(), g.outputs.end(), name) == g.outputs.end())
            throw std::invalid_argument("iterate_graph: '" + name + "' is not an output");
        if (state >= g.state_count())
            throw std::invalid_argument("iterate_graph: bound state out of range");
    }
    if (elgot && g.effect == EffectKind::SubDist)
        throw std::invalid_argument("iterate_graph: no unguarded subdistribution iteration");

    // Closed layer per bound name: the branches its Output leaves expand to.
    std::map<std::string, std::vector<GraphBranch>> closed;
    for (const auto& [name, state] : bind) {
        if (!elgot) {
            for (const auto& br : g.layers[state].branches)
                if (br.kind == GraphBranch::Kind::Output && bind.count(br.label))
                    throw std::runtime_error("iterate_graph: output '" + br.label +
                                             "' unguarded at bound state of '" + name + "'");
            closed[name] = g.layers[state].branches;
        } else {
            std::vector<std::string> reach{name};
            std::set<std::string> seen{name};
            std::vector<GraphBranch> acc;
            for (size_t i = 0; i < reach.size(); ++i)
                for (const auto& br : g.layers[bind.at(reach[i])].branches) {
                    if (br.kind == GraphBranch::Kind::Output && bind.count(br.label)) {
                        if (seen.insert(br.label).second) reach.push_back(br.label);
                    } else {
                        acc.push_back(br);
                    }
                }
            closed[name] = std::move(acc);
        }
    }

    ProcessGraph result;
    result.effect = g.effect;
    result.actions = g.actions;
    for (const auto& y : g.outputs)
        if (!bind.count(y)) result.outputs.push_back(y);
    result.layers.reserve(g.state_count());
    for (StateId s = 0; s < g.state_count(); ++s) {
        std::vector<GraphBranch> branches;
        for (const auto& br : g.layers[s].branches) {
            if (br.kind == GraphBranch::Kind::Output && bind.count(br.label)) {
                for (const auto& sub : closed.at(br.label)) {
                    GraphBranch nb = sub;
                    nb.weight = br.weight * sub.weight;
                    branches.push_back(std::move(nb));
                }
            } else {
                branches.push_back(br);
            }
        }
        result.layers.push_back(make_layer(result.effect, std::move(branches)));
    }
    result.roots = g.roots;
    return result;
}

// --- step-counting and maybe instances ----------------------------------

bool StepSystem::is_var(const std::string& name) const {
    return std::find(vars.begin(), vars.end(), name) != vars.end();
}

StepsSolution solve_banach(const StepSystem& f, bool parallel_rows) {
    for (const auto& v : f.vars) {
        auto it = f.table.find(v);
        if (it == f.table.end())
            throw std::invalid_argument("solve_banach: no row for '" + v + "'");
        const StepRow& row = it->second;
        if (!row.infinite && f.is_var(row.target) && row.steps == 0) {
            GuardReport report;
            report.guarded = false;
            report.violations.push_back({v, v, row.target});
            throw GuardednessError(std::move(report));
        }
    }

    const size_t n = f.vars.size();
    std::vector<StepValue> current(n), next(n);
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) index[f.vars[i]] = i;

    StepsSolution result;
    for (const auto& v : f.vars) result.trace.stabilized_at[v] = 0;

    bool stabilized = n == 0;
    for (unsigned round = 1; round <= n + 2; ++round) {
        auto step_row = [&](size_t i) {
            const StepRow& row = f.table.at(f.vars[i]);
            if (row.infinite) {
                next[i] = StepValue::inf();
            } else if (!f.is_var(row.target)) {
                next[i] = StepValue::done(row.target, row.steps);
            } else {
                const StepValue& prev = current[index.at(row.target)];
                next[i] = prev.infinite ? StepValue::inf()
                                        : StepValue::done(prev.output, row.steps + prev.steps);
            }
        };
#ifdef _OPENMP
        if (parallel_rows) {
#pragma omp parallel for schedule(static)
            for (long i = 0; i < long(n); ++i) step_row(size_t(i));
        } else {
            for (size_t i = 0; i < n; ++i) step_row(i);
        }
#else
        (void)parallel_rows;
        for (size_t i = 0; i < n; ++i) step_row(i);
#endif
        result.trace.iterations = round;
        bool changed = false;
        for (size_t i = 0; i < n; ++i)
            if (!(next[i] == current[i])) {
                changed = true;
                result.trace.stabilized_at[f.vars[i]] = round;
            }
        current.swap(next);
        if (!changed) {
            stabilized = true;
            break;
        }
    }
    if (!stabilized) throw std::logic_error("solve_banach: no stabilization within |vars|+1");
    for (size_t i = 0; i < n; ++i) result.values[f.vars[i]] = current[i];
    return result;
}

std::map<std::string, FlatValue> solve_kleene(const FlatSystem& f, bool parallel_rows,
                                              SolveTrace* trace) {
    const size_t n = f.vars.size();
    std::vector<FlatValue> current(n), next(n);
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) {
        index[f.vars[i]] = i;
        if (!f.table.count(f.vars[i]))
            throw std::invalid_argument("solve_kleene: no row for '" + f.vars[i] + "'");
    }
    auto is_var = [&](const std::string& name) { return index.count(name) != 0; };
    if (trace)
        for (const auto& v : f.vars) trace->stabilized_at[v] = 0;

    for (unsigned round = 1; round <= n + 2; ++round) {
        auto step_row = [&](size_t i) {
            const FlatRow& row = f.table.at(f.vars[i]);
            if (row.bottom) next[i] = FlatValue::bot();
            else if (!is_var(row.target)) next[i] = FlatValue::done(row.target);
            else next[i] = current[index.at(row.target)];
        };
#ifdef _OPENMP
        if (parallel_rows) {
#pragma omp parallel for schedule(static)
            for (long i = 0; i < long(n); ++i) step_row(size_t(i));
        } else {
            for (size_t i = 0; i < n; ++i) step_row(i);
        }
#else
        (void)parallel_rows;
        for (size_t i = 0; i < n; ++i) step_row(i);
#endif
        bool changed = false;
        for (size_t i = 0; i < n; ++i)
            if (!(next[i] == current[i])) {
                changed = true;
                if (trace) trace->stabilized_at[f.vars[i]] = round;
            }
        if (trace) trace->iterations = round;
        current.swap(next);
        if (!changed) break;
    }
    std::map<std::string, FlatValue> out;
    for (size_t i = 0; i < n; ++i) out[f.vars[i]] = current[i];
    return out;
}

FlatValue rho_steps(const StepValue& v) {
    return v.infinite ? FlatValue::bot() : FlatValue::done(v.output);
}

StepValue upsilon_steps(const FlatValue& v) {
    return v.bottom ? StepValue::inf() : StepValue::done(v.output, 1);
}

StepSystem upsilon_system(const FlatSystem& f) {
    StepSystem out;
    out.vars = f.vars;
    out.outs = f.outs;
    for (const auto& [v, row] : f.table)
        out.table[v] = row.bottom ? StepRow{true, "", 0} : StepRow{false, row.target, 1};
    return out;
}

FlatSystem rho_system(const StepSystem& f) {
    FlatSystem out;
    out.vars = f.vars;
    out.outs = f.outs;
    for (const auto& [v, row] : f.table)
        out.table[v] = row.infinite ? FlatRow{true, ""} : FlatRow{false, row.target};
    return out;
}

std::set<std::string> rho_outputs(const ProcessGraph& g, StateId r) {
    if (g.effect != EffectKind::Set)
        throw std::invalid_argument("rho_outputs: requires the set instance");
    std::set<std::string> found;
    std::vector<bool> visited(g.state_count(), false);
    std::vector<StateId> stack{r};
    if (r >= g.state_count()) throw std::invalid_argument("rho_outputs: state out of range");
    visited[r] = true;
    while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        for (const auto& br : g.layers[s].branches) {
            if (br.kind == GraphBranch::Kind::Output) {
                found.insert(br.label);
            } else if (!visited[br.target]) {
                visited[br.target] = true;
                stack.push_back(br.target);
            }
        }
    }
    return found;
}

bool check_fixpoint(const EquationSystem& f, const ProcessGraph& solution) {
    std::set<std::string> want(f.params.begin(), f.params.end());
    std::set<std::string> have(solution.outputs.begin(), solution.outputs.end());
    if (want != have)
        throw std::invalid_argument("check_fixpoint: solution outputs differ from params");

    ProcessGraph literal = literal_graph(f);
    std::map<std::string, StateId> bind;
    for (const auto& v : f.vars) bind[v] = solution.root(v);
    ProcessGraph substituted = kleisli_substitute(literal, bind, solution);
    for (const auto& v : f.vars) {
        BisimResult r = bisimilar(substituted, substituted.root(v), solution, solution.root(v));
        if (!r.related) return false;
    }
    return true;
}

// --- text formats --------------------------------------------------------

namespace {

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

StepSystem parse_step_system(const std::string& text) {
    StepSystem sys;
    bool saw_header = false;
    std::string body;
    // Strip '#' comments line by line.
    for (size_t pos = 0; pos < text.size();) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        body += line + "\n";
        pos = eol + 1;
    }
    size_t pos = 0;
    while (pos < body.size()) {
        size_t semi = body.find(';', pos);
        if (semi == std::string::npos) {
            if (!strip(body.substr(pos)).empty())
                throw std::invalid_argument("step system: missing ';' after '" +
                                            strip(body.substr(pos)) + "'");
            break;
        }
        std::string stmt = strip(body.substr(pos, semi - pos));
        pos = semi + 1;
        if (stmt.empty()) continue;
        if (stmt == "steps") {
            saw_header = true;
        } else if (stmt.rfind("vars", 0) == 0) {
            sys.vars = split_names(stmt.substr(4));
        } else if (stmt.rfind("outs", 0) == 0) {
            sys.outs = split_names(stmt.substr(4));
        } else {
            size_t arrow = stmt.find("->");
            if (arrow == std::string::npos)
                throw std::invalid_argument("step system: expected '->' in '" + stmt + "'");
            std::string var = strip(stmt.substr(0, arrow));
            std::string rest = strip(stmt.substr(arrow + 2));
            StepRow row;
            if (rest == "inf") {
                row.infinite = true;
            } else {
                size_t at = rest.find('@');
                if (at == std::string::npos)
                    throw std::invalid_argument("step system: expected '@ steps' in '" + stmt +
                                                "'");
                row.target = strip(rest.substr(0, at));
                std::string num = strip(rest.substr(at + 1));
                if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
                    throw std::invalid_argument("step system: bad step count '" + num + "'");
                row.steps = std::stoull(num);
            }
            if (sys.table.count(var))
                throw std::invalid_argument("step system: duplicate row for '" + var + "'");
            sys.table[var] = row;
        }
    }
    if (!saw_header) throw std::invalid_argument("step system: missing 'steps;' header");
    for (const auto& v : sys.vars)
        if (!sys.table.count(v))
            throw std::invalid_argument("step system: no row for var '" + v + "'");
    for (const auto& [v, row] : sys.table) {
        if (!sys.is_var(v)) throw std::invalid_argument("step system: row for undeclared '" + v + "'");
        if (!row.infinite && !sys.is_var(row.target) &&
            std::find(sys.outs.begin(), sys.outs.end(), row.target) == sys.outs.end())
            throw std::invalid_argument("step system: undeclared target '" + row.target + "'");
    }
    return sys;
}

std::string dump_step_values(const std::map<std::string, StepValue>& values) {
    std::string out;
    for (const auto& [v, val] : values)
        out += v + " = " +
               (val.infinite ? "inf" : "(" + val.output + "," + std::to_string(val.steps) + ")") +
               "\n";
    return out;
}

std::string dump_flat_values(const std::map<std::string, FlatValue>& values) {
    std::string out;
    for (const auto& [v, val] : values)
        out += v + " = " + (val.bottom ? "bot" : "(" + val.output + ")") + "\n";
    return out;
}

std::string dump_trace(const SolveTrace& trace) {
    std::string out = "iterations: " + std::to_string(trace.iterations) + "\n";
    out += "stabilized:";
    for (const auto& [v, round] : trace.stabilized_at)
        out += " " + v + "@" + std::to_string(round);
    return out + "\n";
}

}  // namespace prociter
