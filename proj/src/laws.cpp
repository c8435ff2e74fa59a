#include "prociter/laws.hpp"

#include <algorithm>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prociter {

Rng trial_rng(uint64_t seed, unsigned trial) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ull * (uint64_t(trial) + 1)));
    r.next();
    return r;
}

LawVerdict run_trials(const std::string& law, const GenParams& p,
                      const std::function<std::optional<std::string>(unsigned)>& fn) {
    auto one = [&](unsigned trial) -> std::optional<std::string> {
        try {
            return fn(trial);
        } catch (const std::exception& e) {
            return std::string("exception: ") + e.what();
        }
    };
    std::vector<std::optional<std::string>> slots(p.trials);
#ifdef _OPENMP
    if (p.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < long(p.trials); ++i) slots[i] = one(unsigned(i));
    } else {
        for (unsigned i = 0; i < p.trials; ++i) slots[i] = one(i);
    }
#else
    for (unsigned i = 0; i < p.trials; ++i) slots[i] = one(i);
#endif
    LawVerdict v;
    v.law = law;
    v.trials = p.trials;
    for (unsigned i = 0; i < p.trials; ++i)
        if (slots[i]) v.failures.push_back({i, *slots[i]});
    return v;
}

std::string format_verdict(const LawVerdict& v, bool with_details) {
    if (v.passed())
        return "PASS " + v.law + " (" + std::to_string(v.trials) + " trials)\n";
    std::string out = "FAIL " + v.law + " (" + std::to_string(v.failures.size()) + "/" +
                      std::to_string(v.trials) + " trials failed; first at trial " +
                      std::to_string(v.failures.front().trial) + ")\n";
    if (with_details) {
        std::istringstream detail(v.failures.front().detail);
        std::string line;
        while (std::getline(detail, line)) out += "  " + line + "\n";
    }
    return out;
}

// --- generation -----------------------------------------------------------

namespace {

// Leaf pools for term generation: `free_names` may appear anywhere,
// `guarded_names` only under a guard prefix (the generator inserts one
// when needed).
struct GenScope {
    EffectKind effect;
    std::vector<std::string> actions;  // incl tau
    std::set<std::string> guards;      // actions that discharge guardedness
    std::vector<std::string> free_names;
    std::vector<std::string> guarded_names;
};

TermPtr gen_term(Rng& rng, const GenScope& sc, unsigned depth, bool guarded_above);

TermPtr gen_leaf(Rng& rng, const GenScope& sc, bool guarded_above) {
    const bool may_use_guarded = !sc.guarded_names.empty();
    // Pick a name; wrap guarded-only names in a guard prefix when no
    // guard sits above yet.
    bool pick_guarded = may_use_guarded && rng.chance(2, 5);
    if (!pick_guarded && sc.free_names.empty()) pick_guarded = may_use_guarded;
    if (!pick_guarded && sc.free_names.empty()) return make_deadlock();
    if (pick_guarded) {
        const auto& name = sc.guarded_names[rng.below(sc.guarded_names.size())];
        if (guarded_above) return make_leaf(name);
        std::vector<std::string> guard_pool(sc.guards.begin(), sc.guards.end());
        if (guard_pool.empty()) return make_deadlock();
        return make_prefix(guard_pool[rng.below(guard_pool.size())], make_leaf(name));
    }
    return make_leaf(sc.free_names[rng.below(sc.free_names.size())]);
}

std::vector<TermBranch> weighted_branches(Rng& rng, const GenScope& sc,
                                          std::vector<TermPtr> terms) {
    std::vector<TermBranch> out;
    if (sc.effect == EffectKind::SubDist && !terms.empty()) {
        uint64_t den = terms.size() + rng.below(terms.size() + 2);
        for (auto& t : terms) out.push_back({Rational(1, int64_t(den)), std::move(t)});
    } else {
        for (auto& t : terms) out.push_back({Rational(1), std::move(t)});
    }
    return out;
}

TermPtr gen_term(Rng& rng, const GenScope& sc, unsigned depth, bool guarded_above) {
    if (depth == 0) return gen_leaf(rng, sc, guarded_above);
    switch (rng.below(10)) {
        case 0:
        case 1:
        case 2: return gen_leaf(rng, sc, guarded_above);
        case 3:
        case 4:
        case 5:
        case 6: {
            const auto& action = sc.actions[rng.below(sc.actions.size())];
            return make_prefix(action, gen_term(rng, sc, depth - 1,
                                                guarded_above || sc.guards.count(action)));
        }
        default: {
            uint64_t max_k = sc.effect == EffectKind::Maybe ? 1 : 3;
            uint64_t k = rng.below(max_k + 1);
            std::vector<TermPtr> terms;
            for (uint64_t i = 0; i < k; ++i)
                terms.push_back(gen_term(rng, sc, depth - 1, guarded_above));
            return make_choice(weighted_branches(rng, sc, std::move(terms)));
        }
    }
}

// Equations are sums at the top, the shape recursive process
// definitions take: x = y1 + ... + a1.t1 + ... + am.tm.
TermPtr gen_equation(Rng& rng, const GenScope& sc, unsigned depth, unsigned max_branching) {
    uint64_t max_k = sc.effect == EffectKind::Maybe ? 1 : max_branching;
    uint64_t k = 1 + rng.below(max_k);
    std::vector<TermPtr> terms;
    for (uint64_t i = 0; i < k; ++i)
        terms.push_back(gen_term(rng, sc, depth >= 1 ? depth - 1 : 0, false));
    return make_choice(weighted_branches(rng, sc, std::move(terms)));
}

std::vector<std::string> numbered(const std::string& stem, unsigned count) {
    std::vector<std::string> out;
    for (unsigned i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

GenScope scope_for(const GenParams& p, const std::vector<std::string>& actions,
                   const std::vector<std::string>& params,
                   const std::vector<std::string>& vars) {
    GenScope sc;
    sc.effect = p.effect;
    sc.actions = actions;
    sc.guards = {actions.begin(), actions.end()};
    sc.free_names = params;
    switch (p.mode.kind) {
        case GuardMode::Kind::Vacuous: break;  // vars never placed
        case GuardMode::Kind::ActionGuarded:
        case GuardMode::Kind::StepPositive: sc.guarded_names = vars; break;
        case GuardMode::Kind::Total:
            for (const auto& v : vars) sc.free_names.push_back(v);
            break;
    }
    return sc;
}

EquationSystem make_system(EffectKind effect, std::vector<std::string> actions,
                           std::vector<std::string> params, std::vector<std::string> vars,
                           std::map<std::string, TermPtr> equations) {
    EquationSystem sys;
    sys.effect = effect;
    sys.actions = std::move(actions);
    sys.params = std::move(params);
    sys.vars = std::move(vars);
    sys.equations = std::move(equations);
    return sys;
}

std::vector<std::string> gen_actions(Rng& rng, const GenParams& p) {
    std::vector<std::string> actions{kTau};
    unsigned n = 1 + unsigned(rng.below(p.max_actions));
    for (unsigned i = 0; i < n; ++i) actions.push_back(std::string(1, char('a' + i)));
    return actions;
}

}  // namespace

EquationSystem gen_system(const GenParams& p, unsigned trial) {
    Rng rng = trial_rng(p.seed, trial);
    auto actions = gen_actions(rng, p);
    auto params = numbered("y", 1 + unsigned(rng.below(p.max_params)));
    auto vars = numbered("x", 1 + unsigned(rng.below(p.max_vars)));
    GenScope sc = scope_for(p, actions, params, vars);
    std::map<std::string, TermPtr> equations;
    for (const auto& v : vars) equations[v] = gen_equation(rng, sc, p.max_depth, p.max_branching);
    return make_system(p.effect, actions, params, vars, std::move(equations));
}

ProcessGraph solve_for_mode(const EquationSystem& sys, const GuardMode& mode) {
    switch (mode.kind) {
        case GuardMode::Kind::Total: return solve_elgot(sys);
        case GuardMode::Kind::Vacuous:
            return solve_unique(sys, GuardMode::vacuous()).graph;
        case GuardMode::Kind::ActionGuarded:
            return solve_unique(sys, mode.guards.empty() ? GuardMode::action_guarded_all(sys)
                                                         : mode)
                .graph;
        default:
            throw std::invalid_argument("solve_for_mode: unsupported mode " + mode.describe());
    }
}

// --- shared helpers -------------------------------------------------------

namespace {

std::optional<std::string> expect_bisimilar(const ProcessGraph& lhs, const std::string& lname,
                                            StateId lroot, const ProcessGraph& rhs,
                                            StateId rroot, const std::string& context) {
    BisimResult r = bisimilar(lhs, lroot, rhs, rroot);
    if (r.related) return std::nullopt;
    std::string detail = context + ": sides differ at root '" + lname + "'";
    if (r.distinguishing_depth)
        detail += " (distinguishing depth " + std::to_string(*r.distinguishing_depth) + ")";
    detail += "\nlhs:\n" + lts_dump(minimize(lhs)) + "rhs:\n" + lts_dump(minimize(rhs));
    return detail;
}

// Negative-control mutation: drop the first droppable branch.
EquationSystem drop_a_branch(const EquationSystem& sys) {
    EquationSystem out = sys;
    for (const auto& v : sys.vars) {
        const TermPtr& eq = sys.equation(v);
        if (const auto* c = std::get_if<Choice>(&eq->node)) {
            if (c->branches.empty()) continue;
            std::vector<TermBranch> rest(c->branches.begin() + 1, c->branches.end());
            out.equations[v] = make_choice(std::move(rest));
            return out;
        }
        out.equations[v] = make_deadlock();
        return out;
    }
    return out;
}

// Rename some var leaves to a tagged param copy (codiagonal's (Y+X)+X
// shape); deterministic in rng.
TermPtr tag_var_leaves(Rng& rng, const EquationSystem& sys, const TermPtr& t) {
    if (const auto* l = std::get_if<Leaf>(&t->node)) {
        if (sys.is_var(l->name) && rng.chance(1, 2)) return make_leaf(l->name + "@1");
        return t;
    }
    if (const auto* p = std::get_if<Prefix>(&t->node))
        return make_prefix(p->action, tag_var_leaves(rng, sys, p->body));
    const auto& c = std::get<Choice>(t->node);
    std::vector<TermBranch> branches;
    for (const auto& br : c.branches)
        branches.push_back({br.weight, tag_var_leaves(rng, sys, br.term)});
    return make_choice(std::move(branches));
}

std::string describe_system(const char* name, const EquationSystem& sys) {
    return std::string(name) + ":\n" + print_system(sys);
}

}  // namespace

// --- the iteration laws ---------------------------------------------------

LawVerdict law_fixpoint(const GenParams& p, Sabotage sabotage) {
    return run_trials("fixpoint", p, [&](unsigned trial) -> std::optional<std::string> {
        EquationSystem sys = gen_system(p, trial);
        ProcessGraph solved = solve_for_mode(sys, p.mode);
        EquationSystem probe = sabotage == Sabotage::None ? sys : drop_a_branch(sys);
        if (check_fixpoint(probe, solved)) return std::nullopt;
        return "fixpoint identity failed\n" + describe_system("f", probe);
    });
}

LawVerdict law_naturality(const GenParams& p, Sabotage sabotage) {
    return run_trials("naturality", p, [&](unsigned trial) -> std::optional<std::string> {
        EquationSystem sys = gen_system(p, trial);
        Rng rng = trial_rng(p.seed ^ 0x6e61747572ull, trial);
        auto zs = numbered("z", 1 + unsigned(rng.below(p.max_params)));
        GenScope sc{p.effect, sys.actions, {sys.actions.begin(), sys.actions.end()}, zs, {}};
        std::vector<std::pair<std::string, TermPtr>> g_rows;
        std::map<std::string, TermPtr> g_binding;
        for (const auto& y : sys.params) {
            TermPtr row = gen_term(rng, sc, p.max_depth, true);
            g_rows.push_back({y, row});
            g_binding[y] = row;
        }

        // lhs: g* applied to the solution of f.
        ProcessGraph solved = solve_for_mode(sys, p.mode);
        ProcessGraph g_graph = term_graph(p.effect, sys.actions, zs, g_rows);
        std::map<std::string, StateId> bind;
        for (const auto& y : sys.params) bind[y] = g_graph.root(y);
        ProcessGraph lhs = kleisli_substitute(solved, bind, g_graph);

        // rhs: solve the rearranged system over params Z.
        std::map<std::string, TermPtr> rearranged;
        for (const auto& v : sys.vars)
            rearranged[v] = substitute_term(sys.equation(v), g_binding);
        EquationSystem rhs_sys =
            make_system(p.effect, sys.actions, zs, sys.vars, std::move(rearranged));
        if (sabotage != Sabotage::None) rhs_sys = drop_a_branch(rhs_sys);
        ProcessGraph rhs = solve_for_mode(rhs_sys, p.mode);

        for (const auto& v : sys.vars)
            if (auto fail = expect_bisimilar(lhs, v, lhs.root(v), rhs, rhs.root(v),
                                             "naturality"))
                return *fail + describe_system("f", sys) + describe_system("g<>f", rhs_sys);
        return std::nullopt;
    });
}

LawVerdict law_codiagonal(const GenParams& p, Sabotage sabotage) {
    return run_trials("codiagonal", p, [&](unsigned trial) -> std::optional<std::string> {
        EquationSystem sys = gen_system(p, trial);
        Rng rng = trial_rng(p.seed ^ 0x636f646961ull, trial);

        // Doubly-indexed presentation: some var leaves move to the inner
        // copy x@1, kept as params of the staged system.
        std::vector<std::string> tags;
        std::vector<std::string> staged_params = sys.params;
        for (const auto& v : sys.vars) {
            tags.push_back(v + "@1");
            staged_params.push_back(v + "@1");
        }
        std::map<std::string, TermPtr> staged_rows;
        for (const auto& v : sys.vars)
            staged_rows[v] = tag_var_leaves(rng, sys, sys.equation(v));
        EquationSystem staged =
            make_system(p.effect, sys.actions, staged_params, sys.vars, std::move(staged_rows));

        // lhs: collapse both copies and iterate once.
        EquationSystem collapsed = sabotage == Sabotage::None ? sys : drop_a_branch(sys);
        ProcessGraph lhs = solve_for_mode(collapsed, p.mode);

        // rhs: iterate the staged system, then iterate the inner copy at
        // the graph level.
        ProcessGraph stage1 = solve_for_mode(staged, p.mode);
        std::map<std::string, StateId> bind;
        for (const auto& v : sys.vars) bind[v + "@1"] = stage1.root(v);
        ProcessGraph rhs = iterate_graph(stage1, bind, p.mode.kind == GuardMode::Kind::Total);

        for (const auto& v : sys.vars)
            if (auto fail = expect_bisimilar(lhs, v, lhs.root(v), rhs, rhs.root(v),
                                             "codiagonal"))
                return *fail + describe_system("f (tagged)", staged);
        return std::nullopt;
    });
}

LawVerdict law_uniformity(const GenParams& p, Sabotage sabotage) {
    return run_trials("uniformity", p, [&](unsigned trial) -> std::optional<std::string> {
        EquationSystem gsys = gen_system(p, trial);  // g : Z -> T(Y+Z), vars named x_i here
        Rng rng = trial_rng(p.seed ^ 0x756e69ull, trial);

        // h injective: z_i -> u_i, plus extra rows of f off h's image.
        unsigned extras = unsigned(rng.below(2));
        auto xs = numbered("u", unsigned(gsys.vars.size()) + extras);
        std::map<std::string, TermPtr> rename;
        for (size_t i = 0; i < gsys.vars.size(); ++i)
            rename[gsys.vars[i]] = make_leaf(xs[i]);

        std::map<std::string, TermPtr> f_rows;
        for (size_t i = 0; i < gsys.vars.size(); ++i)
            f_rows[xs[i]] = substitute_term(gsys.equation(gsys.vars[i]), rename);
        GenScope sc = scope_for(p, gsys.actions, gsys.params, xs);
        for (size_t i = gsys.vars.size(); i < xs.size(); ++i)
            f_rows[xs[i]] = gen_equation(rng, sc, p.max_depth, p.max_branching);
        EquationSystem fsys =
            make_system(p.effect, gsys.actions, gsys.params, xs, std::move(f_rows));
        if (sabotage != Sabotage::None) fsys = drop_a_branch(fsys);  // premise broken on image

        ProcessGraph gf = solve_for_mode(fsys, p.mode);
        ProcessGraph gg = solve_for_mode(gsys, p.mode);
        for (size_t i = 0; i < gsys.vars.size(); ++i)
            if (auto fail = expect_bisimilar(gf, xs[i], gf.root(xs[i]), gg,
                                             gg.root(gsys.vars[i]), "uniformity"))
                return *fail + describe_system("g", gsys) + describe_system("f", fsys);
        return std::nullopt;
    });
}

namespace {

std::optional<std::string> dinaturality_variant(const GenParams& p, unsigned trial,
                                                bool guard_g, Sabotage sabotage) {
    Rng rng = trial_rng(p.seed ^ (guard_g ? 0x64696e31ull : 0x64696e32ull), trial);
    auto actions = gen_actions(rng, p);
    auto params = numbered("y", 1 + unsigned(rng.below(p.max_params)));
    auto xs = numbered("x", 1 + unsigned(rng.below(p.max_vars)));
    auto zs = numbered("w", 1 + unsigned(rng.below(p.max_vars)));
    const bool total = p.mode.kind == GuardMode::Kind::Total;

    // g rows over Y+Z (guarded at Z in variant 1), h rows over Y+X
    // (guarded at X in variant 2). Vacuous guardedness means the summand
    // does not occur at all; total guardedness lets both sides range free.
    const bool vacuous = p.mode.kind == GuardMode::Kind::Vacuous;
    GenScope g_scope{p.effect, actions, {actions.begin(), actions.end()}, params, {}};
    GenScope h_scope = g_scope;
    auto allow = [&](GenScope& sc, const std::vector<std::string>& names, bool must_guard) {
        if (must_guard && vacuous) return;  // the summand stays unused
        if (must_guard && !total) sc.guarded_names = names;
        else
            for (const auto& n : names) sc.free_names.push_back(n);
    };
    allow(g_scope, zs, guard_g);
    allow(h_scope, xs, !guard_g);

    std::map<std::string, TermPtr> g_rows, h_rows;
    for (const auto& x : xs) g_rows[x] = gen_equation(rng, g_scope, p.max_depth, p.max_branching);
    for (const auto& z : zs) h_rows[z] = gen_equation(rng, h_scope, p.max_depth, p.max_branching);

    std::map<std::string, TermPtr> h_binding, g_binding;
    for (const auto& z : zs) h_binding[z] = h_rows[z];
    for (const auto& x : xs) g_binding[x] = g_rows[x];

    // lhs: ([eta inl, h]* g)-dagger over vars X.
    std::map<std::string, TermPtr> lhs_rows;
    for (const auto& x : xs) lhs_rows[x] = substitute_term(g_rows[x], h_binding);
    ProcessGraph lhs =
        solve_for_mode(make_system(p.effect, actions, params, xs, std::move(lhs_rows)), p.mode);

    // inner: ([eta inl, g]* h)-dagger over vars Z.
    std::map<std::string, TermPtr> inner_rows;
    for (const auto& z : zs) inner_rows[z] = substitute_term(h_rows[z], g_binding);
    EquationSystem inner_sys = make_system(p.effect, actions, params, zs, std::move(inner_rows));
    if (sabotage != Sabotage::None) inner_sys = drop_a_branch(inner_sys);
    ProcessGraph inner = solve_for_mode(inner_sys, p.mode);

    // rhs: [eta, inner]* g at the graph level.
    std::vector<std::string> alphabet = params;
    for (const auto& z : zs) alphabet.push_back(z);
    std::vector<std::pair<std::string, TermPtr>> g_literal_rows;
    for (const auto& x : xs) g_literal_rows.push_back({x, g_rows[x]});
    ProcessGraph g_literal = term_graph(p.effect, actions, alphabet, g_literal_rows);
    std::map<std::string, StateId> bind;
    for (const auto& z : zs) bind[z] = inner.root(z);
    ProcessGraph rhs = kleisli_substitute(g_literal, bind, inner);

    for (const auto& x : xs)
        if (auto fail = expect_bisimilar(lhs, x, lhs.root(x), rhs, rhs.root(x),
                                         guard_g ? "dinaturality (g guarded)"
                                                 : "dinaturality (h guarded)"))
            return fail;
    return std::nullopt;
}

}  // namespace

LawVerdict law_dinaturality(const GenParams& p, Sabotage sabotage) {
    return run_trials("dinaturality", p, [&](unsigned trial) -> std::optional<std::string> {
        if (auto fail = dinaturality_variant(p, trial, true, sabotage)) return fail;
        return dinaturality_variant(p, trial, false, sabotage);
    });
}

LawVerdict law_bekic(const GenParams& p, Sabotage sabotage) {
    return run_trials("bekic", p, [&](unsigned trial) -> std::optional<std::string> {
        Rng rng = trial_rng(p.seed ^ 0x62656b6963ull, trial);
        auto actions = gen_actions(rng, p);
        auto params = numbered("y", 1 + unsigned(rng.below(p.max_params)));
        auto xs = numbered("x", 1 + unsigned(rng.below(p.max_vars)));
        auto zs = numbered("w", unsigned(rng.below(p.max_vars)));  // possibly empty
        std::vector<std::string> all_vars = xs;
        all_vars.insert(all_vars.end(), zs.begin(), zs.end());

        GenScope sc = scope_for(p, actions, params, all_vars);
        std::map<std::string, TermPtr> rows;
        for (const auto& v : all_vars) rows[v] = gen_equation(rng, sc, p.max_depth, p.max_branching);

        // lhs: one big iteration over X+Z.
        EquationSystem whole = make_system(p.effect, actions, params, all_vars, rows);
        if (sabotage != Sabotage::None) whole = drop_a_branch(whole);
        ProcessGraph lhs = solve_for_mode(whole, p.mode);

        // rhs: iterate g over Z with X as params, substitute into f,
        // iterate the result over X, then resubstitute.
        std::vector<std::string> yx = params;
        yx.insert(yx.end(), xs.begin(), xs.end());
        std::map<std::string, TermPtr> g_rows;
        for (const auto& z : zs) g_rows[z] = rows[z];
        ProcessGraph g_dagger =
            solve_for_mode(make_system(p.effect, actions, yx, zs, std::move(g_rows)), p.mode);

        std::vector<std::string> alphabet = yx;
        alphabet.insert(alphabet.end(), zs.begin(), zs.end());
        std::vector<std::pair<std::string, TermPtr>> f_rows;
        for (const auto& x : xs) f_rows.push_back({x, rows[x]});
        ProcessGraph f_literal = term_graph(p.effect, actions, alphabet, f_rows);
        std::map<std::string, StateId> bind_z;
        for (const auto& z : zs) bind_z[z] = g_dagger.root(z);
        ProcessGraph h = kleisli_substitute(f_literal, bind_z, g_dagger);

        std::map<std::string, StateId> bind_x;
        for (const auto& x : xs) bind_x[x] = h.root(x);
        ProcessGraph h_dagger = iterate_graph(h, bind_x, p.mode.kind == GuardMode::Kind::Total);

        std::map<std::string, StateId> bind_x2;
        for (const auto& x : xs) bind_x2[x] = h_dagger.root(x);
        ProcessGraph z_side = kleisli_substitute(g_dagger, bind_x2, h_dagger);

        for (const auto& x : xs)
            if (auto fail = expect_bisimilar(lhs, x, lhs.root(x), h_dagger, h_dagger.root(x),
                                             "bekic (X component)"))
                return *fail + describe_system("[f,g]", whole);
        for (const auto& z : zs)
            if (auto fail = expect_bisimilar(lhs, z, lhs.root(z), z_side, z_side.root(z),
                                             "bekic (Z component)"))
                return *fail + describe_system("[f,g]", whole);
        return std::nullopt;
    });
}

// --- retraction suite -----------------------------------------------------

namespace {

// Least-fixpoint output closure of the collapsed system: all params
// reachable through leaves of any depth.
std::set<std::string> system_output_closure(const EquationSystem& sys, const std::string& var,
                                            bool transitive) {
    std::vector<std::string> stack{var};
    std::set<std::string> seen{var};
    std::set<std::string> outputs;
    auto scan = [&](const TermPtr& t, auto&& self) -> void {
        if (const auto* l = std::get_if<Leaf>(&t->node)) {
            if (sys.is_param(l->name)) {
                outputs.insert(l->name);
            } else if (transitive && seen.insert(l->name).second) {
                stack.push_back(l->name);
            }
            return;
        }
        if (const auto* p = std::get_if<Prefix>(&t->node)) {
            self(p->body, self);
            return;
        }
        for (const auto& br : std::get<Choice>(t->node).branches) self(br.term, self);
    };
    while (!stack.empty()) {
        std::string v = stack.back();
        stack.pop_back();
        scan(sys.equation(v), scan);
    }
    return outputs;
}

// The direct trace-level solution: subset construction over the literal
// graph of f, with Var outputs acting as epsilon moves into the
// corresponding root. This is the least-fixpoint iteration in the
// finite-trace monad, independent of solve_unique.
TraceAutomaton nfa_trace_solve(const EquationSystem& sys, const std::string& var) {
    ProcessGraph lit = literal_graph(sys);
    auto eps_close = [&](std::set<StateId> subset) {
        std::vector<StateId> stack(subset.begin(), subset.end());
        while (!stack.empty()) {
            StateId s = stack.back();
            stack.pop_back();
            for (const auto& br : lit.layers[s].branches)
                if (br.kind == GraphBranch::Kind::Output && sys.is_var(br.label))
                    if (subset.insert(lit.root(br.label)).second)
                        stack.push_back(lit.root(br.label));
        }
        return subset;
    };

    TraceAutomaton aut;
    aut.actions = sys.actions;
    aut.outputs = sys.params;
    std::vector<std::string> letters = sys.actions;
    std::sort(letters.begin(), letters.end());

    std::map<std::set<StateId>, uint32_t> ids;
    std::vector<std::set<StateId>> worklist;
    auto intern = [&](std::set<StateId> subset) {
        auto [it, fresh] = ids.emplace(std::move(subset), uint32_t(ids.size()));
        if (fresh) {
            worklist.push_back(it->first);
            aut.states.emplace_back();
        }
        return it->second;
    };

    aut.start = intern(eps_close({lit.root(var)}));
    for (size_t i = 0; i < worklist.size(); ++i) {
        std::set<StateId> subset = worklist[i];
        for (StateId s : subset)
            for (const auto& br : lit.layers[s].branches)
                if (br.kind == GraphBranch::Kind::Output && sys.is_param(br.label))
                    aut.states[i].outputs.insert(br.label);
        for (const auto& a : letters) {
            std::set<StateId> next;
            for (StateId s : subset)
                for (const auto& br : lit.layers[s].branches)
                    if (br.kind == GraphBranch::Kind::Step && br.label == a)
                        next.insert(br.target);
            if (next.empty()) continue;
            uint32_t target = intern(eps_close(std::move(next)));
            aut.states[i].next[a] = target;
        }
    }
    return aut;
}

}  // namespace

LawVerdict check_retraction_elgot(const GenParams& p, Sabotage sabotage) {
    if (p.effect != EffectKind::Set)
        throw std::invalid_argument("check_retraction_elgot: requires the set instance");
    return run_trials("retraction", p, [&](unsigned trial) -> std::optional<std::string> {
        EquationSystem sys = gen_system(p, trial);
        ProcessGraph solved = solve_for_mode(sys, p.mode);

        for (const auto& v : sys.vars) {
            // (A) output collapse: rho(f-dagger) = (rho f)-dagger.
            auto lhs = rho_outputs(solved, solved.root(v));
            auto rhs = system_output_closure(sys, v, sabotage == Sabotage::None);
            if (lhs != rhs)
                return "output collapse mismatch at '" + v + "'\n" + describe_system("f", sys);

            // (B) trace collapse: automaton of the solution vs the direct
            // trace-level solution.
            TraceAutomaton via_solution = rho_trace_automaton(solved, solved.root(v));
            TraceAutomaton direct = nfa_trace_solve(sys, v);
            if (!automata_equivalent(via_solution, direct))
                return "trace collapse mismatch at '" + v + "'\n" + describe_system("f", sys);

            // rho-upsilon round trip at the trace level.
            ProcessGraph determinized = upsilon_determinize(via_solution);
            if (!trace_equiv(determinized, determinized.root("start"), solved, solved.root(v)))
                return "rho/upsilon round trip failed at '" + v + "'\n" +
                       describe_system("f", sys);
        }
        return std::nullopt;
    });
}

FlatSystem gen_flat_system(const GenParams& p, unsigned trial) {
    Rng rng = trial_rng(p.seed ^ 0x666c6174ull, trial);
    FlatSystem sys;
    sys.vars = numbered("x", 1 + unsigned(rng.below(p.max_vars)));
    sys.outs = numbered("y", 1 + unsigned(rng.below(p.max_params)));
    for (const auto& v : sys.vars) {
        switch (rng.below(5)) {
            case 0: sys.table[v] = {true, ""}; break;
            case 1:
            case 2: sys.table[v] = {false, sys.outs[rng.below(sys.outs.size())]}; break;
            default: sys.table[v] = {false, sys.vars[rng.below(sys.vars.size())]}; break;
        }
    }
    return sys;
}

StepSystem gen_step_system(const GenParams& p, unsigned trial) {
    Rng rng = trial_rng(p.seed ^ 0x73746570ull, trial);
    StepSystem sys;
    sys.vars = numbered("x", 1 + unsigned(rng.below(p.max_vars)));
    sys.outs = numbered("y", 1 + unsigned(rng.below(p.max_params)));
    for (const auto& v : sys.vars) {
        switch (rng.below(5)) {
            case 0: sys.table[v] = {true, "", 0}; break;
            case 1:
            case 2:
                sys.table[v] = {false, sys.outs[rng.below(sys.outs.size())], rng.below(4)};
                break;
            default:
                sys.table[v] = {false, sys.vars[rng.below(sys.vars.size())],
                                1 + rng.below(4)};
                break;
        }
    }
    return sys;
}

LawVerdict check_retraction_steps(const GenParams& p, Sabotage sabotage) {
    return run_trials("steps-coincidence", p, [&](unsigned trial) -> std::optional<std::string> {
        // Coincidence of the two routes: rho . banach . upsilon = kleene, exactly.
        FlatSystem flat = gen_flat_system(p, trial);
        auto kleene = solve_kleene(flat);
        auto banach = solve_banach(upsilon_system(flat));
        auto rho = [&](const StepValue& v) -> FlatValue {
            if (sabotage != Sabotage::None && !v.infinite && v.steps > 0)
                return FlatValue::bot();  // corrupted collapse
            return rho_steps(v);
        };
        for (const auto& v : flat.vars)
            if (!(rho(banach.values.at(v)) == kleene.at(v)))
                return "banach/kleene coincidence failed at '" + v + "'";

        // Iteration congruence: perturbing step counts (keeping targets
        // and positivity) never changes the collapsed solution.
        StepSystem steps = gen_step_system(p, trial);
        Rng rng = trial_rng(p.seed ^ 0x70657274ull, trial);
        StepSystem perturbed = steps;
        for (auto& [v, row] : perturbed.table)
            if (!row.infinite) row.steps = steps.is_var(row.target) ? 1 + rng.below(7)
                                                                    : rng.below(7);
        auto base = solve_banach(steps);
        auto moved = solve_banach(perturbed);
        for (const auto& v : steps.vars)
            if (!(rho_steps(base.values.at(v)) == rho_steps(moved.values.at(v))))
                return "iteration congruence failed at '" + v + "'";

        // Identity (5.2): rho (upsilon rho f)-dagger = rho f-dagger.
        auto relifted = solve_banach(upsilon_system(rho_system(steps)));
        for (const auto& v : steps.vars)
            if (!(rho_steps(relifted.values.at(v)) == rho_steps(base.values.at(v))))
                return "rho(upsilon rho f)-dagger != rho(f-dagger) at '" + v + "'";
        return std::nullopt;
    });
}

// --- delay-monad instance -------------------------------------------------

DelayValue delay_eta(const std::string& output) { return DelayValue::done(output, 0); }

DelayValue delay_triangle(const DelayValue& v) {
    return v.never ? DelayValue::make_never() : DelayValue::done(v.output, v.steps + 1);
}

DelayValue delay_bmu(const DelayDelayValue& v) {
    if (v.never_outer || v.inner.never) return DelayValue::make_never();
    return DelayValue::done(v.inner.output, v.outer_steps + v.inner.steps);
}

FlatValue rho_delay(const DelayValue& v) {
    return v.never ? FlatValue::bot() : FlatValue::done(v.output);
}

namespace {

// rho . (rho mapped over the inner layer): collapse the inner value
// first, then the outer delay structure.
FlatValue rho_of_inner_rho(const DelayDelayValue& v) {
    if (v.never_outer) return FlatValue::bot();
    return rho_delay(v.inner);  // outer steps cancel under rho
}

std::optional<std::string> nu_axioms(const std::string& output, uint64_t k1, uint64_t k2,
                                     bool inner_never, bool never_outer, Sabotage sabotage) {
    auto rho = [&](const DelayValue& v) -> FlatValue {
        if (sabotage != Sabotage::None)
            return (v.never || v.steps > 0) ? FlatValue::bot() : FlatValue::done(v.output);
        return rho_delay(v);
    };

    // rho . eta = id
    if (!(rho(delay_eta(output)) == FlatValue::done(output)))
        return "rho(eta " + output + ") != " + output;

    DelayValue inner = inner_never ? DelayValue::make_never() : DelayValue::done(output, k2);
    // rho . triangle = rho (delay cancellation)
    if (!(rho(delay_triangle(inner)) == rho(inner)))
        return "delay cancellation failed at steps=" + std::to_string(k2);

    DelayDelayValue w =
        never_outer ? DelayDelayValue::make_never() : DelayDelayValue::outer(k1, inner);
    FlatValue lhs = rho(delay_bmu(w));
    FlatValue rhs;
    if (sabotage != Sabotage::None) {
        rhs = w.never_outer ? FlatValue::bot()
                            : ((w.inner.never || w.inner.steps > 0 || w.outer_steps > 0)
                                   ? FlatValue::bot()
                                   : FlatValue::done(w.inner.output));
    } else {
        rhs = rho_of_inner_rho(w);
    }
    if (!(lhs == rhs))
        return "rho(bmu) != rho(inner rho) at k1=" + std::to_string(k1) +
               " k2=" + std::to_string(k2);
    return std::nullopt;
}

}  // namespace

LawVerdict check_nu_algebra(const GenParams& p, Sabotage sabotage) {
    return run_trials("nu-algebra", p, [&](unsigned trial) -> std::optional<std::string> {
        if (trial == 0) {
            // Exhaustive sweep for small step counts.
            for (const std::string output : {"y", "z"})
                for (uint64_t k1 = 0; k1 <= 4; ++k1)
                    for (uint64_t k2 = 0; k2 <= 4; ++k2)
                        for (bool inner_never : {false, true})
                            for (bool never_outer : {false, true})
                                if (auto fail = nu_axioms(output, k1, k2, inner_never,
                                                          never_outer, sabotage))
                                    return fail;
            return std::nullopt;
        }
        Rng rng = trial_rng(p.seed ^ 0x64656c6179ull, trial);
        std::string output = rng.chance(1, 2) ? "y" : "z";
        return nu_axioms(output, rng.below(1u << 30), rng.below(1u << 30), rng.chance(1, 4),
                         rng.chance(1, 8), sabotage);
    });
}

// --- sampled conjecture reports -------------------------------------------

std::string report_trace_conjectures(const GenParams& p) {
    GenParams q = p;
    q.effect = EffectKind::Set;
    q.trials = std::min(p.trials, 50u);
    unsigned morphism_ok = 0, morphism_trace_ok = 0, morphism_total = 0;
    unsigned already_det = 0, det_total = 0;

    for (unsigned trial = 0; trial < q.trials; ++trial) {
        EquationSystem sys = gen_system(q, trial);
        ProcessGraph solved = solve_for_mode(sys, q.mode);
        Rng rng = trial_rng(q.seed ^ 0x72657054ull, trial);
        GenScope sc{q.effect, sys.actions, {sys.actions.begin(), sys.actions.end()},
                    sys.params, {}};
        std::vector<std::pair<std::string, TermPtr>> g_rows;
        for (const auto& y : sys.params)
            g_rows.push_back({y, gen_term(rng, sc, q.max_depth, true)});
        ProcessGraph g_graph = term_graph(q.effect, sys.actions, sys.params, g_rows);

        auto upsilon_rho = [](const ProcessGraph& g, StateId r) {
            return upsilon_determinize(rho_trace_automaton(g, r));
        };

        for (const auto& v : sys.vars) {
            // upsilon as a monad morphism: compare (upsilon rho) of the
            // composite against the composite of (upsilon rho) images.
            std::map<std::string, StateId> bind;
            for (const auto& y : sys.params) bind[y] = g_graph.root(y);
            ProcessGraph composite = kleisli_substitute(solved, bind, g_graph);
            ProcessGraph route1 = upsilon_rho(composite, composite.root(v));

            ProcessGraph f_image = upsilon_rho(solved, solved.root(v));
            ProcessGraph g_image_union;
            std::map<std::string, StateId> det_bind;
            {
                // determinize each g row separately and join them into one carrier
                ProcessGraph acc;
                acc.effect = EffectKind::Set;
                acc.actions = sys.actions;
                acc.outputs = sys.params;
                for (const auto& y : sys.params) {
                    ProcessGraph one = upsilon_rho(g_graph, g_graph.root(y));
                    StateId offset = acc.state_count();
                    for (const auto& layer : one.layers) {
                        std::vector<GraphBranch> branches = layer.branches;
                        for (auto& br : branches)
                            if (br.kind == GraphBranch::Kind::Step) br.target += offset;
                        acc.layers.push_back(make_layer(acc.effect, std::move(branches)));
                    }
                    det_bind[y] = offset + one.root("start");
                }
                g_image_union = std::move(acc);
            }
            ProcessGraph route2 = kleisli_substitute(f_image, det_bind, g_image_union);

            ++morphism_total;
            if (bisimilar(route1, route1.root("start"), route2, route2.root("start")).related)
                ++morphism_ok;
            if (trace_equiv(route1, route1.root("start"), route2, route2.root("start")))
                ++morphism_trace_ok;

            // determinization effect: how often upsilon rho is already a
            // bisimilarity-preserving identity.
            ++det_total;
            if (bisimilar(f_image, f_image.root("start"), solved, solved.root(v)).related)
                ++already_det;
        }
    }
    std::string out;
    out += "REPORT upsilon-monad-morphism (conjectured, not asserted): " +
           std::to_string(morphism_ok) + "/" + std::to_string(morphism_total) +
           " samples bisimilar, " + std::to_string(morphism_trace_ok) + "/" +
           std::to_string(morphism_total) + " trace-equivalent\n";
    out += "REPORT determinization-effect: upsilon.rho changed the bisimilarity class on " +
           std::to_string(det_total - already_det) + "/" + std::to_string(det_total) +
           " samples (trace class always preserved)\n";
    return out;
}

}  // namespace prociter
