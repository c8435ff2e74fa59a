#include "prociter/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "prociter/laws.hpp"
#include "prociter/parser.hpp"
#include "prociter/solve.hpp"
#include "prociter/trace.hpp"

namespace prociter::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::set<std::string> split_commas(const std::string& s) {
    std::set<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.insert(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.insert(cur);
    return out;
}

GuardMode parse_guard_mode(const EquationSystem& sys, const std::string& mode,
                           const std::string& guards) {
    if (mode == "vacuous") return GuardMode::vacuous();
    if (mode == "step") return GuardMode::step_positive();
    if (mode == "total") return GuardMode::total();
    if (mode == "action") {
        if (guards.empty()) return GuardMode::action_guarded_all(sys);
        return GuardMode::action_guarded(split_commas(guards));
    }
    throw std::runtime_error("unknown guard mode '" + mode + "'");
}

// unique when the system is action-guarded (or forced), elgot otherwise.
ProcessGraph solve_auto(const EquationSystem& sys, const std::string& mode) {
    if (mode == "unique")
        return solve_unique(sys, GuardMode::action_guarded_all(sys)).graph;
    if (mode == "elgot") return solve_elgot(sys);
    if (sys.effect == EffectKind::SubDist ||
        check_guarded(sys, all_vars(sys), GuardMode::action_guarded_all(sys)).guarded)
        return solve_unique(sys, GuardMode::action_guarded_all(sys)).graph;
    return solve_elgot(sys);
}

struct LawsOptions {
    std::string instance = "set";
    std::string mode = "action";
    uint64_t seed = 1;
    unsigned trials = 200;
    std::string only_law;
    bool parallel = false;
};

int run_laws(const LawsOptions& opt, std::ostream& out) {
    GenParams p;
    p.seed = opt.seed;
    p.trials = opt.trials;
    p.parallel = opt.parallel;
    if (opt.mode == "action") p.mode = GuardMode::action_guarded({});
    else if (opt.mode == "vacuous") p.mode = GuardMode::vacuous();
    else if (opt.mode == "total") p.mode = GuardMode::total();
    else throw std::runtime_error("laws: unknown mode '" + opt.mode + "'");

    static const std::set<std::string> known_laws = {
        "fixpoint",   "naturality",        "codiagonal", "uniformity",
        "dinaturality", "bekic", "retraction", "steps-coincidence", "nu-algebra"};
    if (!opt.only_law.empty() && !known_laws.count(opt.only_law)) {
        std::string names;
        for (const auto& n : known_laws) names += " " + n;
        throw std::runtime_error("laws: unknown law '" + opt.only_law + "'; known:" + names);
    }

    out << "seed: " << opt.seed << "\n";
    bool failed = false;
    auto emit = [&](const LawVerdict& v) {
        out << format_verdict(v);
        if (!v.passed()) failed = true;
    };
    auto wanted = [&](const std::string& name) {
        return opt.only_law.empty() || opt.only_law == name;
    };

    if (opt.instance == "set" || opt.instance == "maybe") {
        p.effect = opt.instance == "set" ? EffectKind::Set : EffectKind::Maybe;
        if (opt.instance == "maybe" && p.mode.kind != GuardMode::Kind::Total)
            p.mode = GuardMode::total();  // the maybe instance is checked as an Elgot monad
        if (wanted("fixpoint")) emit(law_fixpoint(p));
        if (wanted("naturality")) emit(law_naturality(p));
        if (wanted("codiagonal")) emit(law_codiagonal(p));
        if (wanted("uniformity")) emit(law_uniformity(p));
        if (wanted("dinaturality")) emit(law_dinaturality(p));
        if (wanted("bekic")) emit(law_bekic(p));
        if (opt.instance == "set" && wanted("retraction")) {
            emit(check_retraction_elgot(p));
            out << report_trace_conjectures(p);
        }
    } else if (opt.instance == "steps") {
        if (wanted("steps-coincidence")) emit(check_retraction_steps(p));
        if (wanted("nu-algebra")) emit(check_nu_algebra(p));
    } else {
        throw std::runtime_error("laws: unknown instance '" + opt.instance + "'");
    }
    return failed ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rational process graphs: guarded/unguarded solutions and their laws"};
    app.require_subcommand(1);

    std::string file, file2, root, root2;
    std::string mode = "auto", guards, guard_in, weaken_to, to = "outputs", method = "banach";
    std::string rename;
    std::vector<std::string> more_files;
    unsigned depth = 4;
    int unfold = -1;

    auto* check = app.add_subcommand("check", "guardedness of a system");
    check->add_option("file", file)->required();
    check->add_option("--mode", mode)->default_val("action");
    check->add_option("--guards", guards);
    check->add_option("--guard-in", guard_in);
    check->add_option("--weaken-to", weaken_to);

    auto* solve = app.add_subcommand("solve", "solve and print the minimized LTS");
    solve->add_option("file", file)->required();
    solve->add_option("more_files", more_files);  // copaired into one system
    solve->add_option("--mode", mode)->default_val("auto");
    solve->add_option("--unfold", unfold);
    solve->add_option("--rename", rename);

    auto* bisim = app.add_subcommand("bisim", "strong bisimilarity of two roots");
    bisim->add_option("file1", file)->required();
    bisim->add_option("root1", root)->required();
    bisim->add_option("file2", file2)->required();
    bisim->add_option("root2", root2)->required();
    bisim->add_option("--mode", mode)->default_val("auto");

    auto* traces = app.add_subcommand("traces", "bounded trace set of a root");
    traces->add_option("file", file)->required();
    traces->add_option("root", root)->required();
    traces->add_option("--depth", depth)->default_val(4);
    traces->add_option("--mode", mode)->default_val("auto");

    auto* tequiv = app.add_subcommand("trace-equiv", "finite-trace equivalence of two roots");
    tequiv->add_option("file1", file)->required();
    tequiv->add_option("root1", root)->required();
    tequiv->add_option("file2", file2)->required();
    tequiv->add_option("root2", root2)->required();
    tequiv->add_option("--mode", mode)->default_val("auto");

    auto* collapse = app.add_subcommand("collapse", "rho-image of a root");
    collapse->add_option("file", file)->required();
    collapse->add_option("root", root)->required();
    collapse->add_option("--to", to)->default_val("outputs");
    collapse->add_option("--mode", mode)->default_val("auto");

    auto* steps = app.add_subcommand("steps-solve", "solve a step system");
    steps->add_option("file", file)->required();
    steps->add_option("--method", method)->default_val("banach");

    LawsOptions lopt;
    auto* laws = app.add_subcommand("laws", "randomized law checking");
    laws->add_option("--instance", lopt.instance)->default_val("set");
    laws->add_option("--mode", lopt.mode)->default_val("action");
    laws->add_option("--seed", lopt.seed)->default_val(1);
    laws->add_option("--trials", lopt.trials)->default_val(200);
    laws->add_option("--law", lopt.only_law);
    laws->add_flag("--parallel", lopt.parallel);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (check->parsed()) {
            auto sys = parse_system(read_file(file));
            Summand sigma = guard_in.empty() ? all_vars(sys) : Summand{split_commas(guard_in)};
            if (!weaken_to.empty()) sigma = weaken(sigma, Summand{split_commas(weaken_to)});
            auto report = check_guarded(sys, sigma, parse_guard_mode(sys, mode, guards));
            out << format_report(report);
            return report.guarded ? 0 : 2;
        }
        if (solve->parsed()) {
            auto sys = parse_system(read_file(file));
            for (const auto& extra : more_files)
                sys = copair(sys, parse_system(read_file(extra)));
            if (mode == "elgot") {
                auto closed = epsilon_closure(sys);
                for (const auto& v : closed.vars)
                    out << "closure: " << v << " = " << term_to_string(closed.equation(v))
                        << ";\n";
            }
            ProcessGraph g = minimize(solve_auto(sys, mode));
            if (!rename.empty()) {
                std::map<std::string, std::string> h;
                for (const auto& name : g.outputs) h[name] = name;
                for (const auto& pair : split_commas(rename)) {
                    size_t eq = pair.find('=');
                    if (eq == std::string::npos)
                        throw std::runtime_error("--rename expects old=new pairs");
                    h[pair.substr(0, eq)] = pair.substr(eq + 1);
                }
                g = map_outputs(g, h);
            }
            out << lts_dump(g);
            if (unfold >= 0)
                for (const auto& [name, root_state] : g.roots)
                    out << "unfold " << name << " = "
                        << unfold_to_string(bounded_unfold(g, root_state, unsigned(unfold)))
                        << "\n";
            return 0;
        }
        if (bisim->parsed()) {
            auto sys1 = parse_system(read_file(file));
            auto sys2 = parse_system(read_file(file2));
            auto g1 = solve_auto(sys1, mode);
            auto g2 = solve_auto(sys2, mode);
            auto r = bisimilar(g1, g1.root(root), g2, g2.root(root2));
            if (r.related) {
                out << "yes\n";
                return 0;
            }
            out << "no";
            if (r.distinguishing_depth)
                out << " (distinguishing depth " << *r.distinguishing_depth << ")";
            out << "\n";
            return 1;
        }
        if (traces->parsed()) {
            auto sys = parse_system(read_file(file));
            auto g = solve_auto(sys, mode);
            out << dump_trace_set(traces_bounded(g, g.root(root), depth));
            return 0;
        }
        if (tequiv->parsed()) {
            auto sys1 = parse_system(read_file(file));
            auto sys2 = parse_system(read_file(file2));
            auto g1 = solve_auto(sys1, mode);
            auto g2 = solve_auto(sys2, mode);
            bool equal = trace_equiv(g1, g1.root(root), g2, g2.root(root2));
            out << (equal ? "yes" : "no") << "\n";
            return equal ? 0 : 1;
        }
        if (collapse->parsed()) {
            auto sys = parse_system(read_file(file));
            auto g = solve_auto(sys, mode);
            if (to == "outputs") {
                out << "outputs:";
                for (const auto& name : rho_outputs(g, g.root(root))) out << " " << name;
                out << "\n";
                return 0;
            }
            if (to == "traces") {
                out << dump_automaton(rho_trace_automaton(g, g.root(root)));
                return 0;
            }
            throw std::runtime_error("collapse: unknown target '" + to + "'");
        }
        if (steps->parsed()) {
            auto sys = parse_step_system(read_file(file));
            if (method == "banach") {
                auto sol = solve_banach(sys);
                out << dump_step_values(sol.values) << dump_trace(sol.trace);
                return 0;
            }
            if (method == "kleene") {
                SolveTrace trace;
                auto values = solve_kleene(rho_system(sys), false, &trace);
                out << dump_flat_values(values) << dump_trace(trace);
                return 0;
            }
            throw std::runtime_error("steps-solve: unknown method '" + method + "'");
        }
        if (laws->parsed()) return run_laws(lopt, out);
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const GuardednessError& e) {
        err << e.what();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no command\n";
    return 2;
}

}  // namespace prociter::cli
