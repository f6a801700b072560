#include <doctest.h>

#include <functional>

#include "pomdp/errors.hpp"
#include "pomdp/exact_dp.hpp"
#include "test_util.hpp"

using namespace pomdp;

namespace {

// Full |A||Gamma|^|O| enumeration straight from the backup formula.
PwlcFn enumerate_backup(const Pomdp& m, const PwlcFn& f) {
    const int n = m.num_states(), no = m.num_obs();
    PwlcFn out;
    std::vector<int> choice(no, 0);
    for (int a = 0; a < m.num_actions(); ++a) {
        std::function<void(int)> rec = [&](int o) {
            if (o == no) {
                AlphaVector v;
                v.action = a;
                v.coeffs.assign(n, 0.0);
                for (int s = 0; s < n; ++s) {
                    double acc = 0.0;
                    for (int oo = 0; oo < no; ++oo) {
                        for (int sp = 0; sp < n; ++sp) {
                            acc += m.trans(s, a, sp) * m.obs(a, sp, oo) * f.vectors[choice[oo]].coeffs[sp];
                        }
                    }
                    v.coeffs[s] = m.rho(s, a) + m.discount() * acc;
                }
                out.vectors.push_back(v);
                return;
            }
            for (std::size_t i = 0; i < f.size(); ++i) {
                choice[o] = static_cast<int>(i);
                rec(o + 1);
            }
        };
        rec(0);
    }
    return out;
}

// Lookahead expansion straight from the definition, with V given by a scan.
double expand_q(const Pomdp& m, const PwlcFn& f, const Belief& b, int a) {
    const int n = m.num_states();
    double q = 0.0;
    for (int s = 0; s < n; ++s) q += b[s] * m.rho(s, a);
    for (int o = 0; o < m.num_obs(); ++o) {
        std::vector<double> un(n, 0.0);
        double p = 0.0;
        for (int s = 0; s < n; ++s) {
            for (int sp = 0; sp < n; ++sp) {
                un[sp] += b[s] * m.trans(s, a, sp) * m.obs(a, sp, o);
            }
        }
        for (double x : un) p += x;
        if (p <= 1e-12) continue;
        for (double& x : un) x /= p;
        q += m.discount() * p * testutil::scan_max(f, un);
    }
    return q;
}

}  // namespace

TEST_CASE("exact_backup: single action and observation") {
    const Pomdp m = testutil::single_state({2.0}, 0.5);
    const PwlcFn f = constant_pwlc(1, 4.0);
    const PwlcFn g = exact_backup(m, f);
    REQUIRE(g.size() == 1);
    CHECK(g.vectors[0].coeffs[0] == doctest::Approx(2.0 + 0.5 * 4.0));
    CHECK(g.vectors[0].action == 0);
    CHECK(g.vectors[0].witnesses == std::vector<int>{0});
}

TEST_CASE("exact_backup from the zero function keeps only reward vectors") {
    Rng rng(3);
    const Pomdp m = random_pomdp(rng, {3, 3, 2}, 0.9);
    const PwlcFn g = exact_backup(m, constant_pwlc(3, 0.0));
    for (const auto& v : g.vectors) {
        bool matches = false;
        for (int a = 0; a < 3; ++a) {
            bool same = true;
            for (int s = 0; s < 3; ++s) same = same && std::abs(v.coeffs[s] - m.rho(s, a)) <= 1e-12;
            matches = matches || (same && v.action == a);
        }
        CHECK(matches);
    }
}

TEST_CASE("exact_backup equals enumeration + prune") {
    Rng rng(17);
    for (int t = 0; t < 10; ++t) {
        const Pomdp m = random_pomdp(rng, {2, 2, 2}, 0.9);
        const PwlcFn f = testutil::random_pwlc(rng, 2, 3, 0, 5);
        const PwlcFn fast = exact_backup(m, f);
        const PwlcFn brute = prune(enumerate_backup(m, f));
        for (int i = 0; i < 1000; ++i) {
            const Belief b = sample_belief_uniform(rng, 2);
            CHECK(std::abs(eval_pwlc(fast, b).value - eval_pwlc(brute, b).value) <= 1e-9);
        }
        CHECK(fast.size() == brute.size());
        for (const auto& v : fast.vectors) CHECK(v.witnesses.size() == 2u);
    }
}

TEST_CASE("exact_backup witnesses reproduce the vector") {
    Rng rng(5);
    const Pomdp m = random_pomdp(rng, {3, 2, 3}, 0.8);
    const PwlcFn f = testutil::random_pwlc(rng, 3, 3, 0, 2);
    const PwlcFn g = exact_backup(m, f);
    for (const auto& v : g.vectors) {
        for (int s = 0; s < 3; ++s) {
            double acc = m.rho(s, v.action);
            for (int o = 0; o < 3; ++o) {
                for (int sp = 0; sp < 3; ++sp) acc += m.discount() * m.joint(s, v.action, o, sp) * f.vectors[v.witnesses[o]].coeffs[sp];
            }
            CHECK(acc == doctest::Approx(v.coeffs[s]).epsilon(1e-12));
        }
    }
}

TEST_CASE("exact_backup candidate cap") {
    Rng rng(2);
    const Pomdp m = random_pomdp(rng, {3, 2, 3}, 0.9);
    const PwlcFn f = testutil::random_pwlc(rng, 3, 6, 0, 5);
    BackupOptions opts;
    opts.max_candidates = 1;
    CHECK_THROWS_AS((void)exact_backup(m, f, opts), ResourceError);
}

TEST_CASE("contraction and isotonicity of the exact backup") {
    Rng rng(29);
    for (int t = 0; t < 15; ++t) {
        const Pomdp m = random_pomdp(rng, {2 + t % 2, 2, 2}, 0.9);
        const int n = m.num_states();
        const PwlcFn u = testutil::random_pwlc(rng, n, 3, 0, 5);
        const PwlcFn v = testutil::random_pwlc(rng, n, 3, 0, 5);
        const PwlcFn hu = exact_backup(m, u), hv = exact_backup(m, v);
        CHECK(pwlc_distance(hu, hv) <= m.discount() * pwlc_distance(u, v) + 1e-9);

        PwlcFn w = u;  // w >= u pointwise
        w.vectors.push_back(testutil::random_pwlc(rng, n, 1, 0, 5).vectors[0]);
        REQUIRE(pwlc_sup_diff(u, w) <= 1e-12);
        CHECK(pwlc_sup_diff(hu, exact_backup(m, w)) <= 1e-9);

        // Convexity: midpoint inequality.
        for (int i = 0; i < 50; ++i) {
            const Belief b1 = sample_belief_uniform(rng, n), b2 = sample_belief_uniform(rng, n);
            Belief mid(n);
            for (int s = 0; s < n; ++s) mid[s] = 0.5 * (b1[s] + b2[s]);
            CHECK(hu(mid) <= 0.5 * (hu(b1) + hu(b2)) + 1e-12);
        }
    }
}

TEST_CASE("value_iteration: discount 0 converges to max_a rho") {
    Rng rng(1);
    const Pomdp m = random_pomdp(rng, {3, 3, 2}, 0.0);
    const auto res = value_iteration(m, constant_pwlc(3, 0.0), 1e-6, 10);
    CHECK(res.converged);
    CHECK(res.iterations <= 2);
    for (int i = 0; i < 100; ++i) {
        const Belief b = sample_belief_uniform(rng, 3);
        double best = -1e300;
        for (int a = 0; a < 3; ++a) best = std::max(best, expected_reward(m, b, a));
        CHECK(res.f(b) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("value_iteration: large eps stops after one backup") {
    Rng rng(1);
    const Pomdp m = random_pomdp(rng, {2, 2, 2}, 0.9);
    const auto res = value_iteration(m, default_initial_pwlc(m), 1e6, 50);
    CHECK(res.iterations == 1);
    CHECK(res.converged);
}

TEST_CASE("value_iteration: Bellman error bound against a long-run proxy") {
    Rng rng(44);
    const Pomdp m = random_pomdp(rng, {2, 2, 2}, 0.9);
    const double eps = 0.05;
    const auto res = value_iteration(m, default_initial_pwlc(m), eps, 500);
    REQUIRE(res.converged);
    const auto proxy = value_iteration(m, res.f, 1e-12, 200);
    CHECK(pwlc_distance(res.f, proxy.f) <= accuracy_bounds(eps, 0.9, 1).value_i + 1e-9);
}

TEST_CASE("lookahead_action") {
    // Action 1 pays more in every state; V = 0.
    auto t = testutil::zeros(2, 2, 2), o = testutil::zeros(2, 2, 1), r = testutil::zeros(2, 2, 2);
    for (int a = 0; a < 2; ++a) {
        for (int s = 0; s < 2; ++s) {
            t[a][s][s] = 1.0;
            o[a][s][0] = 1.0;
            r[a][s][s] = a == 1 ? 2.0 : 1.0;
        }
    }
    const Pomdp m(t, o, r, 0.9);
    const auto zero = [](const Belief&) { return 0.0; };
    CHECK(lookahead_action(m, zero, {0.3, 0.7}).action == 1);

    Rng rng(6);
    const Pomdp g0 = random_pomdp(rng, {3, 3, 2}, 0.0);
    const Belief b = sample_belief_uniform(rng, 3);
    int best = 0;
    for (int a = 1; a < 3; ++a) {
        if (expected_reward(g0, b, a) > expected_reward(g0, b, best)) best = a;
    }
    CHECK(lookahead_action(g0, zero, b).action == best);

    const Pomdp rm = random_pomdp(rng, {3, 2, 3}, 0.9, 0.3);
    const auto vi = value_iteration(rm, default_initial_pwlc(rm), 1e-3, 3);
    const ValueFn v = [&](const Belief& x) { return vi.f(x); };
    for (int i = 0; i < 50; ++i) {
        const Belief x = sample_belief_uniform(rng, 3);
        const ActionChoice c = lookahead_action(rm, v, x);
        int oracle = 0;
        double oracle_value = expand_q(rm, vi.f, x, 0);
        for (int a = 1; a < 2; ++a) {
            const double q = expand_q(rm, vi.f, x, a);
            if (q > oracle_value) {
                oracle_value = q;
                oracle = a;
            }
        }
        CHECK(c.action == oracle);
        CHECK(c.value == doctest::Approx(oracle_value).epsilon(1e-12));
    }
}

TEST_CASE("direct_action: tags, crossing point and ties") {
    PwlcFn single;
    single.vectors.push_back({{1.0, 1.0}, 2, {}});
    CHECK(direct_action(single, {0.3, 0.7}) == 2);

    // (1,0) tagged 0 and (0,1) tagged 1 cross at b = (0.5, 0.5).
    PwlcFn cross;
    cross.vectors.push_back({{1.0, 0.0}, 0, {}});
    cross.vectors.push_back({{0.0, 1.0}, 1, {}});
    CHECK(direct_action(cross, {0.5 + 1e-9, 0.5 - 1e-9}) == 0);
    CHECK(direct_action(cross, {0.5 - 1e-9, 0.5 + 1e-9}) == 1);
    CHECK(direct_action(cross, {0.5, 0.5}) == 0);

    PwlcFn untagged = constant_pwlc(2, 1.0);
    CHECK_THROWS_AS((void)direct_action(untagged, {0.5, 0.5}), ValidationError);
}

TEST_CASE("extract_policy_graph") {
    PwlcFn one;
    one.vectors.push_back({{1.0, 2.0}, 1, {0, 0}});
    const PolicyGraph g1 = extract_policy_graph({one});
    REQUIRE(g1.nodes.size() == 1);
    CHECK(g1.nodes[0].next == std::vector<int>{0, 0});

    Rng rng(10);
    const Pomdp m = random_pomdp(rng, {2, 2, 2}, 0.9);
    const auto vi = value_iteration(m, default_initial_pwlc(m), 1e-9, 2, {}, true);
    REQUIRE(vi.history.size() == 2);
    const PolicyGraph g = extract_policy_graph(vi.history);
    for (const auto& node : g.nodes) {
        CHECK(node.next.size() == 2u);
        for (int nx : node.next) CHECK((nx >= 0 && nx < static_cast<int>(g.nodes.size())));
    }
    for (int i = 0; i < 100; ++i) {
        const Belief b = sample_belief_uniform(rng, 2);
        const int start = g.start_node(b);
        CHECK(g.nodes[start].action == direct_action(vi.history.back(), b));
    }

    PwlcFn dangling;
    dangling.vectors.push_back({{0.0, 0.0}, 0, {5, 0}});
    CHECK_THROWS_AS((void)extract_policy_graph({one, dangling}), ValidationError);
}
