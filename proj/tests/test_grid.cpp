#include <doctest.h>

#include "pomdp/bounds.hpp"
#include "pomdp/errors.hpp"
#include "pomdp/exact_dp.hpp"
#include "pomdp/grid.hpp"
#include "test_util.hpp"

using namespace pomdp;

namespace {

Grid random_grid(Rng& rng, int n, int interior) {
    Grid g = Grid::extremes(n);
    for (const auto& b : sample_beliefs_uniform(rng, n, interior)) g.add(b);
    return g;
}

GridValueFn with_values(const Grid& g, const std::vector<double>& v, GridRule rule) {
    GridValueFn f;
    f.grid = g;
    f.values = v;
    f.rule = rule;
    return f;
}

std::vector<double> random_values(Rng& rng, int k, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(static_cast<std::size_t>(k));
    for (double& x : out) x = u(rng);
    return out;
}

// Values of a PWLC function at the grid points.
std::vector<double> sample_pwlc(const PwlcFn& f, const Grid& g) {
    std::vector<double> out;
    for (const auto& p : g.points()) out.push_back(testutil::scan_max(f, p));
    return out;
}

// 2 states, one action; state 0 mixes into (a, 1-a), state 1 into (c, 1-c); one observation.
Pomdp drift_model(double a, double c) {
    auto t = testutil::zeros(1, 2, 2), o = testutil::zeros(1, 2, 1), r = testutil::zeros(1, 2, 2);
    t[0][0] = {a, 1 - a};
    t[0][1] = {c, 1 - c};
    o[0][0][0] = o[0][1][0] = 1.0;
    r[0][0] = {1.0, 1.0};
    return Pomdp(t, o, r, 0.9);
}

}  // namespace

TEST_CASE("grid bookkeeping") {
    Grid g = Grid::extremes(3);
    CHECK(g.size() == 3);
    CHECK(g.contains_extremes());
    for (int s = 0; s < 3; ++s) CHECK(g.extreme_index(s) == s);
    CHECK(g.add({0.2, 0.3, 0.5}) == 3);
    CHECK(g.add({0.2, 0.3, 0.5}) == 3);
    CHECK(g.size() == 4);
    CHECK(g.support(3).size() == 3);
    CHECK(g.support(0).size() == 1);
    CHECK(g.find({0.2, 0.3 + 1e-10, 0.5 - 1e-10}, kGridMemberTol) == 3);
    CHECK_THROWS_AS(Grid(2, {{0.5, 0.5}, {0.5, 0.5}}), ValidationError);
    CHECK_FALSE(Grid(2, {{0.5, 0.5}}).contains_extremes());
    CHECK(parse_grid_rule("kernel") == GridRule::kKernel);
    CHECK_THROWS_AS(parse_grid_rule("cubic"), ValidationError);
}

TEST_CASE("nearest-neighbour rule") {
    Rng rng(1);
    const Grid g = random_grid(rng, 3, 10);
    const auto v = random_values(rng, g.size(), 0, 10);
    const GridValueFn f = with_values(g, v, GridRule::kNearest);
    for (int j = 0; j < g.size(); ++j) CHECK(f(g.point(j)) == v[j]);
    for (const auto& b : sample_beliefs_uniform(rng, 3, 300)) {
        int best = 0;
        double bd = 1e300;
        for (int j = 0; j < g.size(); ++j) {
            double d = 0.0;
            for (int s = 0; s < 3; ++s) d += (b[s] - g.point(j)[s]) * (b[s] - g.point(j)[s]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        CHECK(nn_eval(f, b) == v[best]);
    }
    const GridValueFn single = with_values(Grid(3, {{0.2, 0.2, 0.6}}), {4.5}, GridRule::kNearest);
    CHECK(single({1, 0, 0}) == 4.5);
    CHECK(single({0.1, 0.1, 0.8}) == 4.5);
}

TEST_CASE("kernel rule") {
    Rng rng(2);
    const Grid g = random_grid(rng, 3, 6);
    const auto v = random_values(rng, g.size(), 0, 10);
    GridValueFn f = with_values(g, v, GridRule::kKernel);
    for (const auto& b : sample_beliefs_uniform(rng, 3, 100)) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            double d = 0.0;
            for (int s = 0; s < 3; ++s) d += (b[s] - g.point(j)[s]) * (b[s] - g.point(j)[s]);
            const double w = std::exp(-d / (2 * 0.25 * 0.25));
            num += w * v[j];
            den += w;
        }
        CHECK(kernel_eval(f, b) == doctest::Approx(num / den).epsilon(1e-12));
    }
    f.sigma = 1e3;
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    CHECK(std::abs(kernel_eval(f, {0.1, 0.2, 0.7}) - mean) <= 1e-6);

    const GridValueFn single = with_values(Grid(3, {{0.2, 0.2, 0.6}}), {4.5}, GridRule::kKernel);
    CHECK(single({1, 0, 0}) == doctest::Approx(4.5));
    f.sigma = 0.0;
    CHECK_THROWS_AS(kernel_eval(f, {1, 0, 0}), ValidationError);
}

TEST_CASE("sawtooth rule") {
    const GridValueFn lin = with_values(Grid::extremes(3), {1.0, 2.0, 4.0}, GridRule::kSawtooth);
    CHECK(lin({0.2, 0.3, 0.5}) == doctest::Approx(0.2 + 0.6 + 2.0));

    Grid g2 = Grid::extremes(2);
    g2.add({0.5, 0.5});
    const GridValueFn saw = with_values(g2, {0.0, 0.0, -1.0}, GridRule::kSawtooth);
    CHECK(saw({0.75, 0.25}) == doctest::Approx(-0.5));
    CHECK(saw({0.5, 0.5}) == doctest::Approx(-1.0));

    Rng rng(3);
    const Grid g = random_grid(rng, 4, 12);
    const PwlcFn seed = testutil::random_pwlc(rng, 4, 5, 0, 10);
    const GridValueFn f = with_values(g, sample_pwlc(seed, g), GridRule::kSawtooth);
    for (int j = 0; j < g.size(); ++j) CHECK(f(g.point(j)) == doctest::Approx(f.values[j]).epsilon(1e-12));
    CHECK_THROWS_AS(sawtooth_eval(with_values(Grid(2, {{0.5, 0.5}}), {1.0}, GridRule::kSawtooth), {1, 0}),
                    ValidationError);
}

TEST_CASE("best interpolation LP") {
    Rng rng(4);
    const GridValueFn lin = with_values(Grid::extremes(3), {1.0, 2.0, 4.0}, GridRule::kLp);
    CHECK(lin({0.2, 0.3, 0.5}) == doctest::Approx(2.8));

    const Grid g = random_grid(rng, 3, 8);
    const PwlcFn seed = testutil::random_pwlc(rng, 3, 4, 0, 10);
    const auto v = sample_pwlc(seed, g);
    for (int j = 0; j < g.size(); ++j) CHECK(best_interp_lp(g, v, g.point(j)).value <= v[j] + 1e-9);
    const GridValueFn saw = with_values(g, v, GridRule::kSawtooth);
    for (const auto& b : sample_beliefs_uniform(rng, 3, 1000)) {
        const LpInterp res = best_interp_lp(g, v, b);
        CHECK(res.value <= saw(b) + 1e-9);
        CHECK(res.value >= testutil::scan_max(seed, b) - 1e-9);
    }
}

TEST_CASE("interpolation weights are convex and reproduce the query") {
    Rng rng(5);
    const Grid g = random_grid(rng, 3, 10);
    const auto v = random_values(rng, g.size(), 0, 10);
    for (GridRule rule : {GridRule::kNearest, GridRule::kKernel, GridRule::kSawtooth, GridRule::kLp}) {
        const GridValueFn f = with_values(g, v, rule);
        for (const auto& b : sample_beliefs_uniform(rng, 3, 100)) {
            const InterpWeights w = interp_weights(f, b);
            double sum = 0.0, value = 0.0;
            std::vector<double> mix(3, 0.0);
            for (const auto& [j, x] : w) {
                CHECK(x >= -1e-9);
                sum += x;
                value += x * v[j];
                for (int s = 0; s < 3; ++s) mix[s] += x * g.point(j)[s];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(value == doctest::Approx(f(b)).epsilon(1e-9));
            if (rule == GridRule::kSawtooth || rule == GridRule::kLp) {
                for (int s = 0; s < 3; ++s) CHECK(mix[s] == doctest::Approx(b[s]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("grid backup") {
    Rng rng(6);
    const Pomdp zero = random_pomdp(rng, {3, 2, 2}, 0.0);
    const Grid g = random_grid(rng, 3, 5);
    const auto backed = grid_backup(zero, with_values(g, random_values(rng, g.size(), 0, 5), GridRule::kSawtooth));
    for (int j = 0; j < g.size(); ++j) {
        CHECK(backed[j] == doctest::Approx(std::max(expected_reward(zero, g.point(j), 0),
                                                    expected_reward(zero, g.point(j), 1))));
    }

    const Pomdp one = testutil::single_state({1.0, 2.0}, 0.8);
    const GridValueFn f1 = with_values(Grid::extremes(1), {5.0}, GridRule::kNearest);
    CHECK(grid_backup(one, f1)[0] == doctest::Approx(2.0 + 0.8 * 5.0));

    // Convex interpolation of a convex seed upper-bounds the exact update at grid points.
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        Rng r(seed);
        const Pomdp m = random_pomdp(r, {3, 2, 3}, 0.9, 0.3);
        const Grid grid = random_grid(r, 3, 10);
        const PwlcFn f = testutil::random_pwlc(r, 3, 4, 0, 10);
        const PwlcFn exact = exact_backup(m, f);
        for (GridRule rule : {GridRule::kSawtooth, GridRule::kLp}) {
            const auto up = grid_backup(m, with_values(grid, sample_pwlc(f, grid), rule));
            for (int j = 0; j < grid.size(); ++j) CHECK(up[j] >= exact(grid.point(j)) - 1e-9);
        }
    }
}

TEST_CASE("grid backup contracts") {
    Rng rng(7);
    const Pomdp m = random_pomdp(rng, {3, 2, 2}, 0.85, 0.2);
    const Grid g = random_grid(rng, 3, 8);
    const GridSuccessors succ = grid_successors(m, g);
    for (GridRule rule : {GridRule::kNearest, GridRule::kKernel, GridRule::kSawtooth}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto u = random_values(rng, g.size(), 0, 10), v = random_values(rng, g.size(), 0, 10);
            const auto hu = grid_backup(m, with_values(g, u, rule), succ);
            const auto hv = grid_backup(m, with_values(g, v, rule), succ);
            double din = 0.0, dout = 0.0;
            for (int j = 0; j < g.size(); ++j) {
                din = std::max(din, std::abs(u[j] - v[j]));
                dout = std::max(dout, std::abs(hu[j] - hv[j]));
            }
            CHECK(dout <= 0.85 * din + 1e-9);
        }
    }
}

TEST_CASE("grid MDP construction") {
    // Identity dynamics; observation 0 has probability 0.8 in state 0 and 0.2 in state 1.
    auto t = testutil::zeros(1, 2, 2), o = testutil::zeros(1, 2, 2), r = testutil::zeros(1, 2, 2);
    t[0][0][0] = t[0][1][1] = 1.0;
    o[0][0] = {0.8, 0.2};
    o[0][1] = {0.2, 0.8};
    const Pomdp m(t, o, r, 0.9);
    Grid g = Grid::extremes(2);
    g.add({0.5, 0.5});
    const GridSuccessors succ = grid_successors(m, g);
    const GridValueFn nn = with_values(g, {0, 0, 0}, GridRule::kNearest);
    const FiniteMdp mdp = to_grid_mdp(m, g, succ, build_interp_table(nn, succ));
    auto dense_row = [&](int j) {
        std::vector<double> row(3, 0.0);
        for (const auto& e : mdp.row(j, 0)) row[e.next] += e.prob;
        return row;
    };
    CHECK(dense_row(0) == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(dense_row(1) == std::vector<double>{0.0, 1.0, 0.0});
    const auto mid = dense_row(2);
    CHECK(mid[0] == doctest::Approx(0.5));
    CHECK(mid[1] == doctest::Approx(0.5));
    CHECK(mid[2] == 0.0);

    InterpTable bad = build_interp_table(nn, succ);
    bad.weights[0][0] = {{0, 0.7}};
    CHECK_THROWS_AS(to_grid_mdp(m, g, succ, bad), ValidationError);
    bad.weights[0][0] = {{0, 1.5}, {1, -0.5}};
    CHECK_THROWS_AS(to_grid_mdp(m, g, succ, bad), ValidationError);
}

TEST_CASE("grid MDP fixed point equals iterated grid backup") {
    Rng rng(8);
    const Pomdp m = random_pomdp(rng, {3, 3, 2}, 0.9, 0.2);
    const Grid g = random_grid(rng, 3, 10);
    const GridSuccessors succ = grid_successors(m, g);
    for (GridRule rule : {GridRule::kNearest, GridRule::kKernel}) {
        const GridValueFn f0 = with_values(g, std::vector<double>(g.size(), 0.0), rule);
        const FiniteMdp mdp = to_grid_mdp(m, g, succ, build_interp_table(f0, succ));
        for (const auto& row : mdp.rows) {
            double sum = 0.0;
            for (const auto& e : row) sum += e.prob;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
        const double eps = 1e-8;
        const MdpSolution sol = solve_mdp(mdp, eps);
        GridValueFn it = f0;
        for (int k = 0; k < 400; ++k) it.values = grid_backup(m, it, succ);
        for (int j = 0; j < g.size(); ++j) CHECK(std::abs(sol.values[j] - it.values[j]) <= eps / 0.1);
    }
}

TEST_CASE("sawtooth solver") {
    Rng rng(9);
    const Pomdp m = random_pomdp(rng, {3, 2, 2}, 0.8, 0.2);
    const double eps = 1e-7;

    const SawtoothResult ext = solve_sawtooth(m, Grid::extremes(3), eps, 100);
    CHECK(ext.converged);
    GridValueFn it = with_values(Grid::extremes(3), {0, 0, 0}, GridRule::kSawtooth);
    for (int k = 0; k < 300; ++k) it.values = grid_backup(m, it);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(ext.fn.values[j] - it.values[j]) <= 2 * eps / 0.2);

    const Grid small = random_grid(rng, 3, 5);
    Grid big = small;
    for (const auto& b : sample_beliefs_uniform(rng, 3, 15)) big.add(b);
    const SawtoothResult a = solve_sawtooth(m, small, eps, 100);
    const SawtoothResult b = solve_sawtooth(m, big, eps, 100);
    CHECK(a.converged);
    CHECK(b.converged);
    for (int j = 0; j < small.size(); ++j) CHECK(b.fn.values[j] <= a.fn.values[j] + 2 * eps / 0.2);

    // Direct fixed-point check: solving with the sawtooth rule reproduces a grid backup.
    const auto again = grid_backup(m, b.fn);
    for (int j = 0; j < big.size(); ++j) CHECK(std::abs(again[j] - b.fn.values[j]) <= 2 * eps / 0.2);

    const auto vi = value_iteration(m, default_initial_pwlc(m), 1e-7, 300);
    REQUIRE(vi.converged);
    for (const auto& q : sample_beliefs_uniform(rng, 3, 500)) CHECK(b.fn(q) >= vi.f(q) - 1e-5);
    for (int j = 0; j < big.size(); ++j) CHECK(b.fn.values[j] >= vi.f(big.point(j)) - 1e-5);
}

TEST_CASE("adaptive expansion") {
    const Pomdp drift = drift_model(0.5, 0.2);
    const GridValueFn g = with_values(Grid::extremes(2), {10.0, 10.0}, GridRule::kSawtooth);
    Rng rng(1);
    const ExpandResult ex = adaptive_expand(drift, g, rng);
    REQUIRE(ex.points.size() == 2);
    CHECK(ex.skipped == 0);
    CHECK(ex.points[0][0] == doctest::Approx(0.5));
    CHECK(ex.points[1][0] == doctest::Approx(0.2));

    // State 1 is absorbing, so the trajectory from e_1 never leaves the grid.
    const Pomdp stuck = drift_model(0.5, 0.0);
    Rng rng2(1);
    const ExpandResult ex2 = adaptive_expand(stuck, g, rng2, 50);
    CHECK(ex2.points.size() == 1);
    CHECK(ex2.skipped == 1);

    Rng r3(5);
    const Pomdp m = random_pomdp(r3, {4, 3, 3}, 0.9, 0.3);
    const SawtoothResult base = solve_sawtooth(m, Grid::extremes(4), 1e-6, 50);
    Rng a(77), b(77);
    const ExpandResult e1 = adaptive_expand(m, base.fn, a), e2 = adaptive_expand(m, base.fn, b);
    CHECK(e1.points.size() + e1.skipped == 4);
    CHECK(e1.points == e2.points);
}

TEST_CASE("adaptive sawtooth tightens the bound") {
    Rng rng(12);
    const Pomdp m = random_pomdp(rng, {4, 3, 3}, 0.9, 0.3);
    const auto probe = sample_beliefs_uniform(rng, 4, 200);
    Rng grow(3);
    const AdaptiveGridResult res = adaptive_sawtooth(m, 24, 8, 1e-6, 100, grow, &probe);
    CHECK(res.fn.grid.size() == 4 + res.added);
    CHECK(res.added == 24);
    for (std::size_t i = 1; i < res.mean_history.size(); ++i) {
        CHECK(res.mean_history[i] <= res.mean_history[i - 1] + 1e-5);
    }
}
