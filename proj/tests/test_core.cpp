#include "doctest.h"

#include "prociter/laws.hpp"
#include "prociter/parser.hpp"
#include "prociter/solve.hpp"

using namespace prociter;

TEST_SUITE("core") {

TEST_CASE("parse the x = y + a.x system") {
    auto sys = parse_system("effect set; actions a; params y; vars x; x = { y, a.x };");
    CHECK(sys.effect == EffectKind::Set);
    CHECK(sys.vars == std::vector<std::string>{"x"});
    CHECK(sys.params == std::vector<std::string>{"y"});
    CHECK(sys.is_action("a"));
    CHECK(sys.is_action("tau"));
    const auto& eq = sys.equation("x");
    const auto& choice = std::get<Choice>(eq->node);
    REQUIRE(choice.branches.size() == 2);
    CHECK(std::get<Leaf>(choice.branches[0].term->node).name == "y");
    const auto& prefix = std::get<Prefix>(choice.branches[1].term->node);
    CHECK(prefix.action == "a");
    CHECK(std::get<Leaf>(prefix.body->node).name == "x");
}

TEST_CASE("deadlock forms") {
    auto sys = parse_system("effect set; vars x; x = {};");
    CHECK(std::get<Choice>(sys.equation("x")->node).branches.empty());
    auto sugar = parse_system("effect set; vars x; x = 0;");
    CHECK(term_equal(sugar.equation("x"), sys.equation("x")));
}

TEST_CASE("subdist weights are exact rationals") {
    auto sys = parse_system(
        "effect subdist; actions a; params y; vars x; x = { 1/2: y, 1/4: a.x };");
    const auto& choice = std::get<Choice>(sys.equation("x")->node);
    CHECK(choice.branches[0].weight == Rational(1, 2));
    CHECK(choice.branches[1].weight == Rational(1, 4));
    CHECK(choice.branches[0].weight + choice.branches[1].weight == Rational(3, 4));
}

TEST_CASE("vars header optional: left-hand sides declare") {
    auto sys = parse_system("effect set; actions a; params y; x = a.y; z = a.x;");
    CHECK(sys.vars == std::vector<std::string>{"x", "z"});
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_system("effect set; vars x; x = { y };"), ParseError);   // undeclared y
    CHECK_THROWS_AS(parse_system("effect set; vars x; x = ;"), ParseError);        // syntax
    CHECK_THROWS_AS(parse_system("effect set; vars x; x = 0; x = 0;"), ParseError);// duplicate
    CHECK_THROWS_AS(
        parse_system("effect subdist; params y; vars x; x = { 3/4: y, 1/2: y };"),
        ParseError);  // weight sum 5/4
    CHECK_THROWS_AS(parse_system("effect maybe; params y, z; vars x; x = { y, z };"),
                    ParseError);  // maybe arity
    try {
        parse_system("effect set;\nvars x;\nx = { @ };");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("print then reparse is identity") {
    const char* sources[] = {
        "effect set; actions a; params y; vars x; x = { y, a.x };",
        "effect set; vars x; x = {};",
        "effect subdist; actions a, b; params y; vars x, z; "
        "x = { 1/2: y, 1/4: a.z }; z = { b.{ 1/3: y } };",
        "effect maybe; actions a; params y; vars x; x = { a.{ tau.y } };",
    };
    for (const char* src : sources) {
        auto sys = parse_system(src);
        auto printed = print_system(sys);
        auto again = parse_system(printed);
        CHECK(print_system(again) == printed);
        CHECK(again.vars == sys.vars);
        CHECK(again.params == sys.params);
        for (const auto& v : sys.vars) CHECK(term_equal(again.equation(v), sys.equation(v)));
    }
}

TEST_CASE("validate flags broken systems") {
    auto sys = parse_system("effect set; actions a; params y; vars x; x = { y, a.x };");
    CHECK(validate(sys).empty());

    EquationSystem bad = sys;
    bad.effect = EffectKind::SubDist;
    bad.equations["x"] = make_choice({{Rational(3, 4), make_leaf("y")},
                                      {Rational(1, 2), make_leaf("y")}});
    auto violations = validate(bad);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("5/4 > 1") != std::string::npos);

    EquationSystem maybe_bad = sys;
    maybe_bad.effect = EffectKind::Maybe;
    auto v2 = validate(maybe_bad);  // the 2-branch choice is now illegal
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].find("maybe choice") != std::string::npos);
}

TEST_CASE("copair unions disjoint systems") {
    auto f = parse_system("effect set; actions a; params y; vars x1; x1 = a.y;");
    auto g = parse_system("effect set; actions b; params y; vars x2; x2 = b.y;");
    auto both = copair(f, g);
    CHECK(both.vars == std::vector<std::string>{"x1", "x2"});
    CHECK(validate(both).empty());
    CHECK(term_equal(both.equation("x1"), f.equation("x1")));
    CHECK(term_equal(both.equation("x2"), g.equation("x2")));
}

TEST_CASE("copair renames colliding vars") {
    auto f = parse_system("effect set; actions a; params y; vars x; x = a.y;");
    auto g = parse_system("effect set; actions a; params y; vars x; x = a.x;");
    auto both = copair(f, g);
    REQUIRE(both.vars == std::vector<std::string>{"x", "x'"});
    // g's recursive reference follows the rename
    const auto& prefix = std::get<Prefix>(both.equation("x'")->node);
    CHECK(std::get<Leaf>(prefix.body->node).name == "x'");
    CHECK(validate(both).empty());
}

TEST_CASE("copair rejects kind mismatch") {
    auto f = parse_system("effect set; vars x; x = 0;");
    auto g = parse_system("effect maybe; vars z; z = 0;");
    CHECK_THROWS_AS(copair(f, g), std::invalid_argument);
}

TEST_CASE("copair with itself yields bisimilar alpha-copies") {
    auto f = parse_system("effect set; actions a; params y; vars x; x = { y, a.x };");
    auto both = copair(f, f);
    auto solved = solve_unique(both, GuardMode::action_guarded_all(both)).graph;
    auto r = bisimilar(solved, solved.root("x"), solved, solved.root("x'"));
    CHECK(r.related);
}

TEST_CASE("generated systems are print/parse stable") {
    for (auto effect : {EffectKind::Set, EffectKind::SubDist, EffectKind::Maybe}) {
        GenParams p;
        p.effect = effect;
        p.mode = effect == EffectKind::SubDist ? GuardMode::action_guarded({})
                                               : GuardMode::total();
        for (unsigned trial = 0; trial < 40; ++trial) {
            auto sys = gen_system(p, trial);
            auto printed = print_system(sys);
            auto again = parse_system(printed);
            CHECK(print_system(again) == printed);
            for (const auto& v : sys.vars)
                CHECK(term_equal(again.equation(v), sys.equation(v)));
        }
    }
}

TEST_CASE("copair is associative up to var renaming") {
    GenParams p;
    p.mode = GuardMode::action_guarded({});
    for (unsigned trial = 0; trial < 15; ++trial) {
        auto f = gen_system(p, 3 * trial);
        auto g = gen_system(p, 3 * trial + 1);
        auto h = gen_system(p, 3 * trial + 2);
        auto left = copair(copair(f, g), h);
        auto right = copair(f, copair(g, h));
        REQUIRE(left.vars.size() == right.vars.size());
        CHECK(validate(left).empty());
        CHECK(validate(right).empty());
        auto gl = solve_unique(left, GuardMode::action_guarded_all(left)).graph;
        auto gr = solve_unique(right, GuardMode::action_guarded_all(right)).graph;
        for (size_t i = 0; i < left.vars.size(); ++i)
            CHECK(bisimilar(gl, gl.root(left.vars[i]), gr, gr.root(right.vars[i])).related);
    }
}

TEST_CASE("validate agrees with a mutation cross-check") {
    GenParams p;
    p.mode = GuardMode::action_guarded({});
    p.effect = EffectKind::SubDist;
    for (unsigned trial = 0; trial < 25; ++trial) {
        auto sys = gen_system(p, trial);
        CHECK(validate(sys).empty());

        EquationSystem undeclared = sys;
        undeclared.equations[sys.vars.front()] = make_leaf("ghost");
        CHECK(!validate(undeclared).empty());

        EquationSystem bad_action = sys;
        bad_action.equations[sys.vars.front()] =
            make_prefix("ghost_action", make_leaf(sys.params.front()));
        CHECK(!validate(bad_action).empty());

        EquationSystem heavy = sys;
        heavy.equations[sys.vars.front()] =
            make_choice({{Rational(3, 4), make_leaf(sys.params.front())},
                         {Rational(1, 2), make_leaf(sys.params.front())}});
        CHECK(!validate(heavy).empty());

        EquationSystem missing = sys;
        missing.vars.push_back("extra");
        CHECK(!validate(missing).empty());
    }
}

}  // TEST_SUITE
