// Benchmark comparing the serial law harness against the OpenMP one.
// Usage: prociter-bench [trials] [seed]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "prociter/laws.hpp"
#include "prociter/solve.hpp"

using namespace prociter;

namespace {

template <class Fn>
double timed(Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

void run_suite(const GenParams& p) {
    LawVerdict verdicts[] = {
        law_fixpoint(p),    law_naturality(p),   law_codiagonal(p),
        law_uniformity(p),  law_dinaturality(p), law_bekic(p),
        check_retraction_elgot(p),
    };
    for (const auto& v : verdicts)
        if (!v.passed()) {
            std::fprintf(stderr, "unexpected failure: %s\n", format_verdict(v).c_str());
            std::exit(1);
        }
}

void run_banach(const GenParams& p, bool parallel) {
    GenParams q = p;
    q.max_vars = 4000;  // wide rows: the per-round loop is the kernel
    for (unsigned trial = 0; trial < 5; ++trial) {
        StepSystem sys = gen_step_system(q, trial);
        solve_banach(sys, parallel);
    }
}

}  // namespace

int main(int argc, char** argv) {
    GenParams p;
    p.effect = EffectKind::Set;
    p.mode = GuardMode::action_guarded({});
    p.trials = argc > 1 ? unsigned(std::atoi(argv[1])) : 200;
    p.seed = argc > 2 ? uint64_t(std::atoll(argv[2])) : 1;

    std::printf("law suite, %u trials, seed %llu\n", p.trials,
                (unsigned long long)p.seed);
    p.parallel = false;
    double serial = timed([&] { run_suite(p); });
    std::printf("  serial:   %.3f s\n", serial);
    p.parallel = true;
    double parallel = timed([&] { run_suite(p); });
    std::printf("  parallel: %.3f s (x%.2f)\n", parallel, serial / parallel);

    std::printf("banach rows, 5 systems of ~4000 vars\n");
    double bser = timed([&] { run_banach(p, false); });
    std::printf("  serial:   %.3f s\n", bser);
    double bpar = timed([&] { run_banach(p, true); });
    std::printf("  parallel: %.3f s (x%.2f)\n", bpar, bser / bpar);
    return 0;
}
