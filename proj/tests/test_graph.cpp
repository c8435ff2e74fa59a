#include "doctest.h"

#include "oracles.hpp"
#include "prociter/graph.hpp"
#include "prociter/laws.hpp"
#include "prociter/parser.hpp"
#include "prociter/solve.hpp"

using namespace prociter;

namespace {

// The folded one-state solution of x = y + a.x.
ProcessGraph spec32_graph() {
    ProcessGraph g;
    g.effect = EffectKind::Set;
    g.actions = {"tau", "a"};
    g.outputs = {"y"};
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)},
                                             {GraphBranch::Kind::Step, "a", 0, Rational(1)}}));
    g.roots["x"] = 0;
    return g;
}

ProcessGraph spec32_unrolled() {
    ProcessGraph g;
    g.effect = EffectKind::Set;
    g.actions = {"tau", "a"};
    g.outputs = {"y"};
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)},
                                             {GraphBranch::Kind::Step, "a", 1, Rational(1)}}));
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)},
                                             {GraphBranch::Kind::Step, "a", 0, Rational(1)}}));
    g.roots["x"] = 0;
    return g;
}

ProcessGraph deadlock_graph() {
    ProcessGraph g;
    g.effect = EffectKind::Set;
    g.actions = {"tau"};
    g.outputs = {};
    g.layers.push_back(OneLayer{});
    g.roots["x"] = 0;
    return g;
}

}  // namespace

TEST_SUITE("procgraph") {

TEST_CASE("out returns the stored layer") {
    auto g = spec32_graph();
    const auto& layer = out(g, 0);
    REQUIRE(layer.branches.size() == 2);
    CHECK(layer.branches[0].kind == GraphBranch::Kind::Output);
    CHECK(layer.branches[0].label == "y");
    CHECK(layer.branches[1].kind == GraphBranch::Kind::Step);
    CHECK(layer.branches[1].target == 0);
    CHECK(out(deadlock_graph(), 0).branches.empty());
    CHECK_THROWS_AS(out(g, 5), std::invalid_argument);

    // A pure delay loop is a one-branch layer.
    ProcessGraph delay;
    delay.effect = EffectKind::Set;
    delay.actions = {"tau"};
    delay.layers.push_back(make_layer(delay.effect,
                                      {{GraphBranch::Kind::Step, "tau", 0, Rational(1)}}));
    delay.roots["q"] = 0;
    CHECK(out(delay, 0).branches.size() == 1);
}

TEST_CASE("rebuilding a graph from its own layers is the identity") {
    auto g = spec32_unrolled();
    ProcessGraph rebuilt;
    rebuilt.effect = g.effect;
    rebuilt.actions = g.actions;
    rebuilt.outputs = g.outputs;
    for (StateId s = 0; s < g.state_count(); ++s)
        rebuilt.layers.push_back(make_layer(g.effect, out(g, s).branches));
    rebuilt.roots = g.roots;
    CHECK(rebuilt == g);
}

TEST_CASE("layer canonicalization merges duplicates") {
    auto layer = make_layer(EffectKind::Set, {{GraphBranch::Kind::Output, "y", 0, Rational(1)},
                                              {GraphBranch::Kind::Output, "y", 0, Rational(1)}});
    CHECK(layer.branches.size() == 1);

    auto sub = make_layer(EffectKind::SubDist, {{GraphBranch::Kind::Output, "y", 0, Rational(1, 4)},
                                                {GraphBranch::Kind::Output, "y", 0, Rational(1, 2)}});
    REQUIRE(sub.branches.size() == 1);
    CHECK(sub.branches[0].weight == Rational(3, 4));

    CHECK_THROWS(make_layer(EffectKind::SubDist,
                            {{GraphBranch::Kind::Output, "y", 0, Rational(3, 4)},
                             {GraphBranch::Kind::Output, "z", 0, Rational(1, 2)}}));
    CHECK_THROWS(make_layer(EffectKind::Maybe, {{GraphBranch::Kind::Output, "y", 0, Rational(1)},
                                                {GraphBranch::Kind::Output, "z", 0, Rational(1)}}));
}

TEST_CASE("map_outputs identity and swap") {
    auto g = spec32_graph();
    CHECK(map_outputs(g, {{"y", "y"}}) == g);
    auto swapped = map_outputs(g, {{"y", "z"}});
    CHECK(swapped.outputs == std::vector<std::string>{"z"});
    CHECK(swapped.layers[0].branches[0].label == "z");
    CHECK_THROWS_AS(map_outputs(g, {{"w", "y"}}), std::invalid_argument);
}

TEST_CASE("map_outputs collapse merges branches") {
    ProcessGraph g;
    g.effect = EffectKind::Set;
    g.actions = {"tau"};
    g.outputs = {"y", "z"};
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)},
                                             {GraphBranch::Kind::Output, "z", 0, Rational(1)}}));
    g.roots["x"] = 0;
    auto collapsed = map_outputs(g, {{"y", "y"}, {"z", "y"}});
    CHECK(collapsed.outputs == std::vector<std::string>{"y"});
    CHECK(collapsed.layers[0].branches.size() == 1);
}

TEST_CASE("kleisli_substitute: empty bind is identity, unit law") {
    auto g = spec32_graph();
    auto same = kleisli_substitute(g, {}, deadlock_graph());
    CHECK(same.layers == g.layers);

    // g = single state {Output y}; bind y -> root of h  ==> result ~ h
    ProcessGraph unit;
    unit.effect = EffectKind::Set;
    unit.actions = {"tau", "a"};
    unit.outputs = {"y"};
    unit.layers.push_back(make_layer(unit.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    unit.roots["x"] = 0;
    auto h = spec32_graph();
    auto bound = kleisli_substitute(unit, {{"y", h.root("x")}}, h);
    CHECK(bisimilar(bound, bound.root("x"), h, h.root("x")).related);
}

TEST_CASE("kleisli_substitute: a.(out y) bound to z + b.loop") {
    // g = a.(Output y), h = {Output z, b -> h}; expect a.(z + b.(...)).
    ProcessGraph g;
    g.effect = EffectKind::Set;
    g.actions = {"tau", "a", "b"};
    g.outputs = {"y"};
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Step, "a", 1, Rational(1)}}));
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    g.roots["x"] = 0;

    ProcessGraph h;
    h.effect = EffectKind::Set;
    h.actions = {"tau", "a", "b"};
    h.outputs = {"z"};
    h.layers.push_back(make_layer(h.effect, {{GraphBranch::Kind::Output, "z", 0, Rational(1)},
                                             {GraphBranch::Kind::Step, "b", 0, Rational(1)}}));
    h.roots["w"] = 0;

    auto result = kleisli_substitute(g, {{"y", 0}}, h);
    // Bounded unfolding oracle to depth 4: a.(z + b.(z + b.(z + b.^)))
    auto expect = [&] {
        ProcessGraph e;
        e.effect = EffectKind::Set;
        e.actions = {"tau", "a", "b"};
        e.outputs = {"z"};
        e.layers.push_back(make_layer(e.effect, {{GraphBranch::Kind::Step, "a", 1, Rational(1)}}));
        e.layers.push_back(make_layer(e.effect, {{GraphBranch::Kind::Output, "z", 0, Rational(1)},
                                                 {GraphBranch::Kind::Step, "b", 1, Rational(1)}}));
        e.roots["x"] = 0;
        return e;
    }();
    CHECK(unfold_equal(bounded_unfold(result, result.root("x"), 4),
                       bounded_unfold(expect, 0, 4)));
    CHECK(bisimilar(result, result.root("x"), expect, 0).related);
}

TEST_CASE("substitution preserves subdist weight sums") {
    ProcessGraph g;
    g.effect = EffectKind::SubDist;
    g.actions = {"tau", "a"};
    g.outputs = {"y"};
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1, 2)},
                                             {GraphBranch::Kind::Step, "a", 0, Rational(1, 4)}}));
    g.roots["x"] = 0;
    ProcessGraph h;
    h.effect = EffectKind::SubDist;
    h.actions = {"tau", "a"};
    h.outputs = {"z"};
    h.layers.push_back(make_layer(h.effect, {{GraphBranch::Kind::Output, "z", 0, Rational(1, 3)},
                                             {GraphBranch::Kind::Step, "a", 0, Rational(1, 3)}}));
    h.roots["w"] = 0;
    auto result = kleisli_substitute(g, {{"y", 0}}, h);
    // 1/2 * (1/3 + 1/3) + 1/4 = 7/12
    CHECK(layer_weight_sum(out(result, result.root("x"))) == Rational(7, 12));
}

TEST_CASE("bisimilar: reflexivity, loop vs unrolling, classic counterexample") {
    auto g = spec32_graph();
    CHECK(bisimilar(g, 0, g, 0).related);

    auto unrolled = spec32_unrolled();
    auto r = bisimilar(g, 0, unrolled, 0);
    CHECK(r.related);
    CHECK(!r.distinguishing_depth.has_value());

    // a.(b.y) + a.(c.y)  vs  a.(b.y + c.y): trace-equivalent, not bisimilar.
    auto left = parse_system(
        "effect set; actions a, b, c; params y; vars x; x = { a.{ b.y }, a.{ c.y } };");
    auto right = parse_system(
        "effect set; actions a, b, c; params y; vars x; x = { a.{ b.y, c.y } };");
    auto gl = solve_unique(left, GuardMode::action_guarded_all(left)).graph;
    auto gr = solve_unique(right, GuardMode::action_guarded_all(right)).graph;
    auto res = bisimilar(gl, gl.root("x"), gr, gr.root("x"));
    CHECK(!res.related);
    REQUIRE(res.distinguishing_depth.has_value());
    CHECK(*res.distinguishing_depth == 1);
    CHECK(oracle::tree_distinguishing_depth(gl, gl.root("x"), gr, gr.root("x")) == 1u);
}

TEST_CASE("bisimilar rejects signature mismatches") {
    auto g = spec32_graph();
    auto other = map_outputs(g, {{"y", "z"}});
    CHECK_THROWS_AS(bisimilar(g, 0, other, 0), std::invalid_argument);
}

TEST_CASE("probabilistic bisimilarity aggregates weights") {
    // 1/2 a.y + 1/2 a.y' with y-state == y'-state vs a-step of weight 1.
    ProcessGraph split;
    split.effect = EffectKind::SubDist;
    split.actions = {"tau", "a"};
    split.outputs = {"y"};
    split.layers.push_back(make_layer(split.effect,
                                      {{GraphBranch::Kind::Step, "a", 1, Rational(1, 2)},
                                       {GraphBranch::Kind::Step, "a", 2, Rational(1, 2)}}));
    split.layers.push_back(make_layer(split.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    split.layers.push_back(make_layer(split.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    split.roots["x"] = 0;

    ProcessGraph whole;
    whole.effect = EffectKind::SubDist;
    whole.actions = {"tau", "a"};
    whole.outputs = {"y"};
    whole.layers.push_back(make_layer(whole.effect, {{GraphBranch::Kind::Step, "a", 1, Rational(1)}}));
    whole.layers.push_back(make_layer(whole.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    whole.roots["x"] = 0;

    CHECK(bisimilar(split, 0, whole, 0).related);
    CHECK(oracle::tree_bisimilar(split, 0, whole, 0));

    // Different split 1/2 vs 1/3 is NOT bisimilar.
    ProcessGraph skew = whole;
    skew.layers[0] = make_layer(skew.effect, {{GraphBranch::Kind::Step, "a", 1, Rational(1, 3)}});
    CHECK(!bisimilar(split, 0, skew, 0).related);
    CHECK(!oracle::tree_bisimilar(split, 0, skew, 0));
}

TEST_CASE("minimize folds the unrolled loop and is idempotent") {
    auto unrolled = spec32_unrolled();
    auto minimal = minimize(unrolled);
    CHECK(minimal.state_count() == 1);
    CHECK(bisimilar(minimal, minimal.root("x"), unrolled, 0).related);
    CHECK(minimize(minimal) == minimal);

    auto already = minimize(spec32_graph());
    CHECK(minimize(already) == already);
}

TEST_CASE("minimize trims unreachable states") {
    auto g = spec32_graph();
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    auto minimal = minimize(g);
    CHECK(minimal.state_count() == 1);
}

TEST_CASE("minimize preserves subdist weight sums per state") {
    ProcessGraph g;
    g.effect = EffectKind::SubDist;
    g.actions = {"tau", "a"};
    g.outputs = {"y"};
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Step, "a", 1, Rational(1, 2)},
                                             {GraphBranch::Kind::Step, "a", 2, Rational(1, 4)}}));
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    g.layers.push_back(make_layer(g.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1)}}));
    g.roots["x"] = 0;
    auto m = minimize(g);
    CHECK(m.state_count() == 2);
    CHECK(layer_weight_sum(out(m, m.root("x"))) == Rational(3, 4));
}

TEST_CASE("bounded_unfold") {
    auto g = spec32_graph();
    auto t0 = bounded_unfold(g, 0, 0);
    CHECK(t0->truncated);

    // depth 2: y + a.(y + a.^)
    auto t2 = bounded_unfold(g, 0, 2);
    CHECK(unfold_to_string(t2) == "{y,a.{y,a.^}}");

    auto dead = deadlock_graph();
    CHECK(unfold_to_string(bounded_unfold(dead, 0, 3)) == "{}");
    CHECK(!bounded_unfold(dead, 0, 3)->truncated);  // deadlock, not truncation
}

TEST_CASE("bisimilarity is an equivalence relation on sampled triples") {
    GenParams p;
    p.mode = GuardMode::action_guarded({});
    for (unsigned trial = 0; trial < 12; ++trial) {
        auto sys = gen_system(p, trial);
        auto g = solve_unique(sys, GuardMode::action_guarded_all(sys)).graph;
        auto m = minimize(g);
        auto u = kleisli_substitute(g, {}, g);  // identity presentation
        for (const auto& v : sys.vars) {
            StateId a = g.root(v), b = m.root(v), c = u.root(v);
            CHECK(bisimilar(g, a, g, a).related);  // reflexive
            bool ab = bisimilar(g, a, m, b).related;
            bool ba = bisimilar(m, b, g, a).related;
            CHECK(ab == ba);  // symmetric
            if (ab && bisimilar(m, b, u, c).related)
                CHECK(bisimilar(g, a, u, c).related);  // transitive
        }
    }
}

TEST_CASE("minimize reaches the minimum over split presentations") {
    GenParams p;
    p.mode = GuardMode::action_guarded({});
    Rng rng(17);
    for (unsigned trial = 0; trial < 15; ++trial) {
        auto sys = gen_system(p, trial);
        auto g = solve_unique(sys, GuardMode::action_guarded_all(sys)).graph;
        auto minimal = minimize(g);

        // Split a random state into an identical twin and redirect some
        // edges; the result is a larger bisimilar presentation.
        ProcessGraph split = g;
        StateId victim = StateId(rng.below(split.state_count()));
        StateId twin = split.state_count();
        split.layers.push_back(split.layers[victim]);
        for (auto& layer : split.layers) {
            std::vector<GraphBranch> branches = layer.branches;
            bool moved = false;
            for (auto& br : branches)
                if (br.kind == GraphBranch::Kind::Step && br.target == victim && !moved &&
                    rng.chance(1, 2)) {
                    br.target = twin;
                    moved = true;
                }
            layer = make_layer(split.effect, std::move(branches));
        }
        auto reminimized = minimize(split);
        CHECK(reminimized.state_count() == minimal.state_count());
        for (const auto& v : sys.vars)
            CHECK(bisimilar(reminimized, reminimized.root(v), g, g.root(v)).related);
        CHECK(minimize(reminimized) == reminimized);
    }
}

TEST_CASE("probabilistic refinement agrees with the tree oracle on samples") {
    GenParams p;
    p.effect = EffectKind::SubDist;
    p.mode = GuardMode::action_guarded({});
    for (unsigned trial = 0; trial < 30; ++trial) {
        auto sys1 = gen_system(p, 2 * trial);
        auto sys2 = gen_system(p, 2 * trial + 1);
        auto g1 = solve_unique(sys1, GuardMode::action_guarded_all(sys1)).graph;
        auto g2 = (trial % 3 == 0) ? minimize(g1)
                                   : solve_unique(sys2, GuardMode::action_guarded_all(sys2)).graph;
        auto same_set = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
            return std::set<std::string>(a.begin(), a.end()) ==
                   std::set<std::string>(b.begin(), b.end());
        };
        if (!same_set(g1.outputs, g2.outputs) || !same_set(g1.actions, g2.actions)) continue;
        StateId r1 = g1.root(sys1.vars.front());
        StateId r2 = g2.roots.count(sys1.vars.front()) ? g2.root(sys1.vars.front())
                                                       : g2.roots.begin()->second;
        CHECK(bisimilar(g1, r1, g2, r2).related == oracle::tree_bisimilar(g1, r1, g2, r2));
    }
}

TEST_CASE("lts dump format") {
    auto g = minimize(spec32_graph());
    CHECK(lts_dump(g) == "root x = q0\nq0 --a--> q0\nq0 => out y\n");

    ProcessGraph sub;
    sub.effect = EffectKind::SubDist;
    sub.actions = {"tau", "a"};
    sub.outputs = {"y"};
    sub.layers.push_back(make_layer(sub.effect, {{GraphBranch::Kind::Output, "y", 0, Rational(1, 2)}}));
    sub.roots["x"] = 0;
    CHECK(lts_dump(sub) == "root x = q0\nq0 => out y [w=1/2]\n");
}

}  // TEST_SUITE
