#include "doctest.h"

#include "oracles.hpp"
#include "prociter/laws.hpp"
#include "prociter/parser.hpp"

using namespace prociter;

namespace {

GenParams quick(EffectKind effect, GuardMode::Kind mode_kind, unsigned trials = 40) {
    GenParams p;
    p.effect = effect;
    p.mode = mode_kind == GuardMode::Kind::Total ? GuardMode::total()
             : mode_kind == GuardMode::Kind::Vacuous ? GuardMode::vacuous()
                                                     : GuardMode::action_guarded({});
    p.trials = trials;
    return p;
}

}  // namespace

TEST_SUITE("laws") {

TEST_CASE("generator is deterministic and respects its mode") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded);
    for (unsigned trial = 0; trial < 30; ++trial) {
        auto a = gen_system(p, trial);
        auto b = gen_system(p, trial);
        CHECK(print_system(a) == print_system(b));
        CHECK(validate(a).empty());
        CHECK(check_guarded(a, all_vars(a), GuardMode::action_guarded_all(a)).guarded);
    }
    GenParams v = quick(EffectKind::Set, GuardMode::Kind::Vacuous);
    for (unsigned trial = 0; trial < 30; ++trial) {
        auto a = gen_system(v, trial);
        CHECK(check_guarded(a, all_vars(a), GuardMode::vacuous()).guarded);
    }
    GenParams t = quick(EffectKind::Set, GuardMode::Kind::Total);
    bool saw_unguarded = false;
    for (unsigned trial = 0; trial < 30; ++trial) {
        auto a = gen_system(t, trial);
        CHECK(validate(a).empty());
        if (!check_guarded(a, all_vars(a), GuardMode::action_guarded_all(a)).guarded)
            saw_unguarded = true;
    }
    CHECK(saw_unguarded);  // total mode produces bare Var leaves
}

TEST_CASE("generator respects subdist and maybe constraints") {
    GenParams p = quick(EffectKind::SubDist, GuardMode::Kind::ActionGuarded);
    for (unsigned trial = 0; trial < 30; ++trial) CHECK(validate(gen_system(p, trial)).empty());
    GenParams m = quick(EffectKind::Maybe, GuardMode::Kind::Total);
    for (unsigned trial = 0; trial < 30; ++trial) CHECK(validate(gen_system(m, trial)).empty());
}

TEST_CASE("iteration laws pass on quick runs") {
    for (auto kind : {GuardMode::Kind::ActionGuarded, GuardMode::Kind::Total}) {
        GenParams p = quick(EffectKind::Set, kind);
        CHECK(law_fixpoint(p).passed());
        CHECK(law_naturality(p).passed());
        CHECK(law_codiagonal(p).passed());
        CHECK(law_uniformity(p).passed());
        CHECK(law_dinaturality(p).passed());
        CHECK(law_bekic(p).passed());
    }
    GenParams maybe = quick(EffectKind::Maybe, GuardMode::Kind::Total);
    CHECK(law_fixpoint(maybe).passed());
    CHECK(law_naturality(maybe).passed());
    CHECK(law_codiagonal(maybe).passed());
    CHECK(law_uniformity(maybe).passed());
    CHECK(law_dinaturality(maybe).passed());
    CHECK(law_bekic(maybe).passed());
}

TEST_CASE("fixed instances: unit substitutions collapse the laws") {
    // Naturality with g = eta: both sides are the solution of f itself.
    auto f = parse_system("effect set; actions a, b; params y; vars x; x = { y, a.x };");
    auto solved = solve_unique(f, GuardMode::action_guarded_all(f)).graph;
    auto g_graph = term_graph(f.effect, f.actions, {"y"}, {{"y", make_leaf("y")}});
    auto lhs = kleisli_substitute(solved, {{"y", g_graph.root("y")}}, g_graph);
    CHECK(bisimilar(lhs, lhs.root("x"), solved, solved.root("x")).related);

    // Naturality with g : y -> b.z, solved from the rearranged system.
    auto rearranged = parse_system(
        "effect set; actions a, b; params z; vars x; x = { b.z, a.x };");
    auto rhs = solve_unique(rearranged, GuardMode::action_guarded_all(rearranged)).graph;
    auto g2 = term_graph(f.effect, f.actions, {"z"},
                         {{"y", make_prefix("b", make_leaf("z"))}});
    auto lhs2 = kleisli_substitute(solved, {{"y", g2.root("y")}}, g2);
    CHECK(bisimilar(lhs2, lhs2.root("x"), rhs, rhs.root("x")).related);

    // Uniformity with h the identity renaming is trivially the same solve.
    auto again = solve_unique(f, GuardMode::action_guarded_all(f)).graph;
    CHECK(bisimilar(again, again.root("x"), solved, solved.root("x")).related);

    // Codiagonal on x = { y, a.x<1>, a.x<2> }: both orders give the a-loop.
    auto collapsed = parse_system("effect set; actions a; params y; vars x; x = { y, a.x, a.x };");
    auto once = solve_unique(collapsed, GuardMode::action_guarded_all(collapsed)).graph;
    EquationSystem staged = parse_system(
        "effect set; actions a; params y, xi; vars x; x = { y, a.x, a.xi };");
    auto stage1 = solve_unique(staged, GuardMode::action_guarded_all(staged)).graph;
    auto twice = iterate_graph(stage1, {{"xi", stage1.root("x")}}, false);
    CHECK(bisimilar(once, once.root("x"), twice, twice.root("x")).related);
    auto folded = minimize(twice);
    CHECK(lts_dump(folded) == "root x = q0\nq0 --a--> q0\nq0 => out y\n");
}

TEST_CASE("subdist unique instance satisfies the fixpoint law") {
    GenParams p = quick(EffectKind::SubDist, GuardMode::Kind::ActionGuarded);
    CHECK(law_fixpoint(p).passed());
    CHECK(law_naturality(p).passed());
    CHECK(law_uniformity(p).passed());
}

TEST_CASE("negative controls fail") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded, 60);
    CHECK(!law_fixpoint(p, Sabotage::Injected).passed());
    CHECK(!law_naturality(p, Sabotage::Injected).passed());
    CHECK(!law_codiagonal(p, Sabotage::Injected).passed());
    CHECK(!law_uniformity(p, Sabotage::Injected).passed());
    CHECK(!law_dinaturality(p, Sabotage::Injected).passed());
    CHECK(!law_bekic(p, Sabotage::Injected).passed());
    CHECK(!check_retraction_elgot(p, Sabotage::Injected).passed());
    GenParams s = quick(EffectKind::Set, GuardMode::Kind::Total, 60);
    CHECK(!check_retraction_steps(s, Sabotage::Injected).passed());
    CHECK(!check_nu_algebra(s, Sabotage::Injected).passed());
}

TEST_CASE("counterexamples replay deterministically") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded, 60);
    auto first = law_fixpoint(p, Sabotage::Injected);
    auto second = law_fixpoint(p, Sabotage::Injected);
    REQUIRE(!first.passed());
    CHECK(first.failures.front().trial == second.failures.front().trial);
    CHECK(first.failures.front().detail == second.failures.front().detail);
}

TEST_CASE("parallel and serial harnesses agree verdict for verdict") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded, 60);
    GenParams q = p;
    q.parallel = true;
    auto serial = law_bekic(p, Sabotage::Injected);
    auto parallel = law_bekic(q, Sabotage::Injected);
    CHECK(serial.failures.size() == parallel.failures.size());
    for (size_t i = 0; i < serial.failures.size(); ++i) {
        CHECK(serial.failures[i].trial == parallel.failures[i].trial);
        CHECK(serial.failures[i].detail == parallel.failures[i].detail);
    }
    auto s2 = law_fixpoint(p);
    auto p2 = law_fixpoint(q);
    CHECK(s2.passed() == p2.passed());
}

TEST_CASE("retraction suite quick run") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded, 60);
    CHECK(check_retraction_elgot(p).passed());
    GenParams s = quick(EffectKind::Set, GuardMode::Kind::Total, 100);
    CHECK(check_retraction_steps(s).passed());
}

TEST_CASE("banach parallel rows match serial rows") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::Total, 1);
    p.max_vars = 64;
    for (unsigned trial = 0; trial < 20; ++trial) {
        StepSystem sys = gen_step_system(p, trial);
        auto serial = solve_banach(sys, false);
        auto parallel = solve_banach(sys, true);
        CHECK(serial.values == parallel.values);
        CHECK(serial.trace.iterations == parallel.trace.iterations);
    }
}

TEST_CASE("delay operators") {
    CHECK(delay_eta("y") == DelayValue::done("y", 0));
    CHECK(delay_triangle(DelayValue::done("y", 0)) == DelayValue::done("y", 1));
    CHECK(delay_triangle(DelayValue::make_never()) == DelayValue::make_never());
    CHECK(delay_bmu(DelayDelayValue::outer(2, DelayValue::done("y", 3))) ==
          DelayValue::done("y", 5));
    CHECK(delay_bmu(DelayDelayValue::outer(1, DelayValue::make_never())) ==
          DelayValue::make_never());
    CHECK(delay_bmu(DelayDelayValue::make_never()) == DelayValue::make_never());
    CHECK(rho_delay(delay_triangle(DelayValue::done("y", 9))) == FlatValue::done("y"));
}

TEST_CASE("nu-algebra axioms hold") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::Total, 100);
    CHECK(check_nu_algebra(p).passed());
}

TEST_CASE("solutions agree with the tree oracle on random systems") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded);
    for (unsigned trial = 0; trial < 25; ++trial) {
        auto sys = gen_system(p, trial);
        auto g = solve_for_mode(sys, p.mode);
        auto m = minimize(g);
        for (const auto& v : sys.vars) {
            bool fast = bisimilar(g, g.root(v), m, m.root(v)).related;
            bool slow = oracle::tree_bisimilar(g, g.root(v), m, m.root(v));
            CHECK(fast == slow);
            CHECK(fast);
        }
    }
}

TEST_CASE("kleisli substitution associativity at graph level") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded);
    for (unsigned trial = 0; trial < 20; ++trial) {
        auto sys = gen_system(p, trial);
        auto g = solve_for_mode(sys, p.mode);
        Rng rng = trial_rng(p.seed ^ 0x61DD0C, trial);

        // h: params -> graph over Z; k: Z -> graph over W.
        auto zs = std::vector<std::string>{"za", "zb"};
        auto ws = std::vector<std::string>{"wa"};
        std::vector<std::pair<std::string, TermPtr>> h_rows, k_rows;
        for (const auto& y : sys.params) {
            TermPtr body = rng.chance(1, 2) ? make_leaf(zs[rng.below(2)])
                                            : make_prefix(sys.actions[rng.below(
                                                              sys.actions.size())],
                                                          make_leaf(zs[rng.below(2)]));
            h_rows.push_back({y, body});
        }
        for (const auto& z : zs)
            k_rows.push_back({z, rng.chance(1, 2) ? make_leaf("wa") : make_deadlock()});
        auto hg = term_graph(p.effect, sys.actions, zs, h_rows);
        auto kg = term_graph(p.effect, sys.actions, ws, k_rows);

        std::map<std::string, StateId> bind_h, bind_k;
        for (const auto& y : sys.params) bind_h[y] = hg.root(y);
        for (const auto& z : zs) bind_k[z] = kg.root(z);

        // (k* after h*) g  vs  (k* . h)* g.
        auto lhs = kleisli_substitute(kleisli_substitute(g, bind_h, hg), bind_k, kg);
        auto composed = kleisli_substitute(hg, bind_k, kg);
        std::map<std::string, StateId> bind_hk;
        for (const auto& y : sys.params) bind_hk[y] = composed.root(y);
        auto rhs = kleisli_substitute(g, bind_hk, composed);
        for (const auto& v : sys.vars)
            CHECK(bisimilar(lhs, lhs.root(v), rhs, rhs.root(v)).related);
    }
}

TEST_CASE("trace conjecture report renders") {
    GenParams p = quick(EffectKind::Set, GuardMode::Kind::ActionGuarded, 10);
    auto report = report_trace_conjectures(p);
    CHECK(report.find("REPORT upsilon-monad-morphism") != std::string::npos);
    CHECK(report.find("REPORT determinization-effect") != std::string::npos);
}

}  // TEST_SUITE
