#include <doctest.h>

#include "pomdp/bounds.hpp"
#include "pomdp/errors.hpp"
#include "pomdp/exact_dp.hpp"
#include "pomdp/maze.hpp"
#include "test_util.hpp"

using namespace pomdp;

namespace {

// Bellman operator of the underlying MDP, iterated directly from the tables.
std::vector<double> long_run_mdp_values(const Pomdp& m, int iters) {
    const int n = m.num_states();
    std::vector<double> v(n, 0.0), next(n);
    for (int it = 0; it < iters; ++it) {
        for (int s = 0; s < n; ++s) {
            double best = -1e300;
            for (int a = 0; a < m.num_actions(); ++a) {
                double acc = m.rho(s, a);
                for (int sp = 0; sp < n; ++sp) acc += m.discount() * m.trans(s, a, sp) * v[sp];
                best = std::max(best, acc);
            }
            next[s] = best;
        }
        v.swap(next);
    }
    return v;
}

// Value of the FIB update at b, written straight from its definition.
double fib_formula(const Pomdp& m, const PwlcFn& f, const Belief& b) {
    double best = -1e300;
    for (int a = 0; a < m.num_actions(); ++a) {
        double total = 0.0;
        for (int s = 0; s < m.num_states(); ++s) {
            double future = 0.0;
            for (int o = 0; o < m.num_obs(); ++o) {
                double inner = -1e300;
                for (const auto& v : f.vectors) {
                    double acc = 0.0;
                    for (int sp = 0; sp < m.num_states(); ++sp) acc += m.trans(s, a, sp) * m.obs(a, sp, o) * v.coeffs[sp];
                    inner = std::max(inner, acc);
                }
                future += inner;
            }
            total += b[s] * (m.rho(s, a) + m.discount() * future);
        }
        best = std::max(best, total);
    }
    return best;
}

std::vector<Belief> probes(int n, int count, std::uint64_t seed) {
    Rng rng(seed);
    auto out = sample_beliefs_uniform(rng, n, count);
    for (int s = 0; s < n; ++s) out.push_back(extreme_belief(n, s));
    return out;
}

}  // namespace

TEST_CASE("solve_fomdp closed forms") {
    const Pomdp one = testutil::single_state({1.0}, 0.9);
    const QTable q = solve_fomdp(one, 1e-9);
    CHECK(std::abs(q.v[0] - 10.0) <= 1e-9 / 0.1 + 1e-12);

    Rng rng(3);
    const Pomdp m = random_pomdp(rng, {4, 3, 2}, 0.0);
    const QTable q0 = solve_fomdp(m, 1e-9);
    for (int s = 0; s < 4; ++s) {
        for (int a = 0; a < 3; ++a) CHECK(q0.at(s, a) == m.rho(s, a));
    }
    CHECK_THROWS_AS(solve_fomdp(m, 0.0), ValidationError);
}

TEST_CASE("solve_fomdp matches a long-run oracle") {
    Rng rng(11);
    const Pomdp m = random_pomdp(rng, {5, 3, 2}, 0.9);
    const double eps = 1e-6;
    const QTable q = solve_fomdp(m, eps);
    const auto oracle = long_run_mdp_values(m, 10000);
    for (int s = 0; s < 5; ++s) {
        CHECK(std::abs(q.v[s] - oracle[s]) <= 0.9 * eps / 0.1 + 1e-9);
        double mx = -1e300;
        for (int a = 0; a < 3; ++a) mx = std::max(mx, q.at(s, a));
        CHECK(std::abs(mx - q.v[s]) <= 1e-12);
    }
}

TEST_CASE("mdp_value modes") {
    Rng rng(5);
    const Pomdp m = random_pomdp(rng, {4, 3, 2}, 0.9);
    const QTable q = solve_fomdp(m, 1e-8);
    for (int s = 0; s < 4; ++s) {
        const Belief e = extreme_belief(4, s);
        CHECK(mdp_value(q, e, MdpMode::kMdp) == doctest::Approx(q.v[s]));
        CHECK(mdp_value(q, e, MdpMode::kQmdp) == doctest::Approx(q.v[s]));
    }
    for (const auto& b : probes(4, 1000, 6)) {
        CHECK(mdp_value(q, b, MdpMode::kQmdp) <= mdp_value(q, b, MdpMode::kMdp) + 1e-9);
    }

    const Pomdp single = random_pomdp(rng, {4, 1, 2}, 0.9);
    const QTable q1 = solve_fomdp(single, 1e-8);
    for (const auto& b : probes(4, 50, 7)) {
        CHECK(mdp_value(q1, b, MdpMode::kQmdp) == doctest::Approx(mdp_value(q1, b, MdpMode::kMdp)));
    }
}

TEST_CASE("mdp and qmdp backups") {
    Rng rng(8);
    const Pomdp m = random_pomdp(rng, {4, 3, 3}, 0.9);
    const PwlcFn f = testutil::random_pwlc(rng, 4, 3, 0, 5);
    const PwlcFn mdp = mdp_backup(m, f);
    const PwlcFn qmdp = qmdp_backup(m, f);
    CHECK(mdp.size() == 1);
    CHECK(qmdp.size() == 3);
    for (int a = 0; a < 3; ++a) CHECK(qmdp.vectors[a].action == a);

    for (int s = 0; s < 4; ++s) {
        double best = -1e300;
        for (int a = 0; a < 3; ++a) {
            double acc = m.rho(s, a);
            for (int sp = 0; sp < 4; ++sp) {
                double mx = -1e300;
                for (const auto& v : f.vectors) mx = std::max(mx, v.coeffs[sp]);
                acc += 0.9 * m.trans(s, a, sp) * mx;
            }
            CHECK(qmdp.vectors[a].coeffs[s] == doctest::Approx(acc));
            best = std::max(best, acc);
        }
        CHECK(mdp.vectors[0].coeffs[s] == doctest::Approx(best));
    }
    for (const auto& b : probes(4, 1000, 9)) CHECK(qmdp(b) <= mdp(b) + 1e-9);

    const Pomdp zero = random_pomdp(rng, {3, 2, 2}, 0.0);
    const PwlcFn z = mdp_backup(zero, testutil::random_pwlc(rng, 3, 2));
    for (int s = 0; s < 3; ++s) CHECK(z.vectors[0].coeffs[s] == std::max(zero.rho(s, 0), zero.rho(s, 1)));

    const Pomdp one_action = random_pomdp(rng, {3, 1, 2}, 0.9);
    const PwlcFn g = testutil::random_pwlc(rng, 3, 2);
    CHECK(qmdp_backup(one_action, g).vectors[0].coeffs == mdp_backup(one_action, g).vectors[0].coeffs);
}

TEST_CASE("fib backup matches its definition and the bound chain") {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        Rng rng(seed);
        const Pomdp m = random_pomdp(rng, {3, 2, 3}, 0.9, 0.3);
        const PwlcFn f = testutil::random_pwlc(rng, 3, 3, 0, 5);
        const PwlcFn exact = exact_backup(m, f);
        const PwlcFn fib = fib_backup(m, f);
        const PwlcFn qmdp = qmdp_backup(m, f);
        const PwlcFn mdp = mdp_backup(m, f);
        const PwlcFn umdp = umdp_backup(m, f);
        CHECK(fib.size() <= 2);
        for (const auto& b : probes(3, 1000, seed + 100)) {
            CHECK(fib(b) == doctest::Approx(fib_formula(m, f, b)));
            CHECK(exact(b) <= fib(b) + 1e-9);
            CHECK(fib(b) <= qmdp(b) + 1e-9);
            CHECK(qmdp(b) <= mdp(b) + 1e-9);
            CHECK(umdp(b) <= exact(b) + 1e-9);
        }
    }
}

TEST_CASE("single-state model collapses every update") {
    const Pomdp m = testutil::single_state({1.0, 2.0}, 0.8);
    PwlcFn f = constant_pwlc(1, 3.0);
    const Belief b{1.0};
    const double expect = 2.0 + 0.8 * 3.0;
    CHECK(fib_backup(m, f)(b) == doctest::Approx(expect));
    CHECK(qmdp_backup(m, f)(b) == doctest::Approx(expect));
    CHECK(exact_backup(m, f)(b) == doctest::Approx(expect));
}

TEST_CASE("umdp candidates and exactness without observations") {
    Rng rng(31);
    const Pomdp m = random_pomdp(rng, {3, 2, 1}, 0.9);
    const PwlcFn f = testutil::random_pwlc(rng, 3, 4, 0, 5);
    CHECK(umdp_candidates(m, f).size() == 8);
    const PwlcFn umdp = umdp_backup(m, f);
    const PwlcFn exact = exact_backup(m, f);
    for (const auto& b : probes(3, 1000, 32)) CHECK(umdp(b) == doctest::Approx(exact(b)).epsilon(1e-9));
}

TEST_CASE("partitioned fib interpolates between fib and exact") {
    for (std::uint64_t seed = 40; seed < 43; ++seed) {
        Rng rng(seed);
        const Pomdp m = random_pomdp(rng, {4, 2, 2}, 0.9, 0.2);
        const PwlcFn f = testutil::random_pwlc(rng, 4, 3, 0, 5);
        const PwlcFn singles = partitioned_fib_backup(m, f, {{0}, {1}, {2}, {3}});
        const PwlcFn pairs = partitioned_fib_backup(m, f, {{0, 1}, {2, 3}});
        const PwlcFn whole = partitioned_fib_backup(m, f, {{0, 1, 2, 3}});
        const PwlcFn fib = fib_backup(m, f);
        const PwlcFn exact = exact_backup(m, f);
        for (const auto& b : probes(4, 1000, seed + 7)) {
            CHECK(singles(b) == doctest::Approx(fib(b)).epsilon(1e-9));
            CHECK(whole(b) == doctest::Approx(exact(b)).epsilon(1e-9));
            CHECK(pairs(b) <= singles(b) + 1e-9);
            CHECK(whole(b) <= pairs(b) + 1e-9);
        }
    }
    const Pomdp m = testutil::revealing_identity(3);
    const PwlcFn f = constant_pwlc(3, 0.0);
    CHECK_THROWS_AS(partitioned_fib_backup(m, f, {{0, 1}}), ValidationError);
    CHECK_THROWS_AS(partitioned_fib_backup(m, f, {{0, 1}, {1, 2}}), ValidationError);
    CHECK_THROWS_AS(partitioned_fib_backup(m, f, {{0, 1, 2}, {}}), ValidationError);
}

TEST_CASE("fib fixed point through the equivalent MDP") {
    const Pomdp maze = build_maze20(default_maze20());
    CHECK(fib_equivalent_mdp(maze).num_states == 960);

    const Pomdp one = testutil::single_state({1.0}, 0.9);
    const FibTable t1 = fib_fixed_point(one, 1e-9);
    CHECK(std::abs(t1.at(0, 0) - 10.0) <= 1e-9 / 0.1);

    for (std::uint64_t seed = 50; seed < 60; ++seed) {
        Rng rng(seed);
        const Pomdp m = random_pomdp(rng, {4, 3, 3}, 0.9, 0.3);
        const double eps = 1e-6;
        const FibTable t = fib_fixed_point(m, eps);
        CHECK(t.bellman_error <= eps);
        PwlcFn iter = constant_pwlc(4, 0.0);
        for (int k = 0; k < 200; ++k) iter = fib_backup(m, iter);
        for (int s = 0; s < 4; ++s) {
            for (int a = 0; a < 3; ++a) {
                CHECK(std::abs(t.at(s, a) - iter.vectors[a].coeffs[s]) <= eps / (1 - 0.9));
            }
        }
    }
}

TEST_CASE("bound updates contract and are isotone") {
    Rng rng(70);
    const Pomdp m = random_pomdp(rng, {3, 2, 2}, 0.85, 0.2);
    const std::vector<std::function<PwlcFn(const PwlcFn&)>> updates = {
        [&](const PwlcFn& f) { return mdp_backup(m, f); },
        [&](const PwlcFn& f) { return qmdp_backup(m, f); },
        [&](const PwlcFn& f) { return fib_backup(m, f); },
        [&](const PwlcFn& f) { return umdp_backup(m, f); },
    };
    for (int trial = 0; trial < 5; ++trial) {
        const PwlcFn f = testutil::random_pwlc(rng, 3, 3, 0, 5);
        const PwlcFn g = testutil::random_pwlc(rng, 3, 2, 0, 5);
        PwlcFn big = f;
        for (auto& v : big.vectors) {
            for (double& x : v.coeffs) x += 0.5;
        }
        for (const auto& h : updates) {
            CHECK(pwlc_distance(h(f), h(g)) <= 0.85 * pwlc_distance(f, g) + 1e-9);
            CHECK(pwlc_sup_diff(h(f), h(big)) <= 1e-9);
        }
    }
}

TEST_CASE("fib fixed point bounds V* from above, umdp iterates from below") {
    Rng rng(80);
    const Pomdp m = random_pomdp(rng, {3, 2, 2}, 0.7, 0.2);
    const auto exact = value_iteration(m, default_initial_pwlc(m), 1e-6, 200);
    REQUIRE(exact.converged);
    const PwlcFn fib = fib_pwlc(fib_fixed_point(m, 1e-8));
    const auto umdp = iterate_update([&](const PwlcFn& f) { return umdp_backup(m, f); }, default_initial_pwlc(m), 1e-8,
                                     200);
    const double slack = 1e-6 / 0.3 + 1e-7;
    for (const auto& b : probes(3, 1000, 81)) {
        CHECK(fib(b) >= exact.f(b) - slack);
        CHECK(umdp.f(b) <= exact.f(b) + slack);
    }
}
