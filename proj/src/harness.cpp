#include "pomdp/harness.hpp"

#include <cmath>
#include <limits>

#include "pomdp/errors.hpp"

namespace pomdp {

Rng episode_rng(std::uint64_t master_seed, std::uint64_t episode) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32)};
    return Rng(seq);
}

double simulate_episode(const Pomdp& m, Policy& p, const Belief& b0, int horizon, Rng& rng, OpCounter* ops) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    OpCounter local;
    OpCounter& counter = ops ? *ops : local;
    int s = sample_index(b0, unif(rng));
    p.reset(b0, counter);
    double total = 0.0, scale = 1.0;
    std::vector<double> obs_row(static_cast<std::size_t>(m.num_obs()));
    for (int t = 0; t < horizon; ++t) {
        const int a = p.act(counter);
        if (a < 0 || a >= m.num_actions()) throw ValidationError("policy emitted an unknown action");
        const int sp = sample_index(m.trans_row(s, a), unif(rng));
        total += scale * m.reward(s, a, sp);
        scale *= m.discount();
        for (int o = 0; o < m.num_obs(); ++o) obs_row[o] = m.obs(a, sp, o);
        const int o = sample_index(obs_row, unif(rng));
        p.observe(a, o, counter);
        s = sp;
    }
    return total;
}

double ControlResult::ops_per_decision(int num_states) const {
    if (decisions == 0) return 0.0;
    return static_cast<double>(ops.weighted(num_states)) / static_cast<double>(decisions);
}

std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

ControlResult control_quality(const Pomdp& m, Policy& p, const std::vector<Belief>& starts, int horizon,
                              std::uint64_t seed) {
    ControlResult res;
    res.returns.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        Rng rng = episode_rng(seed, i);
        res.returns.push_back(simulate_episode(m, p, starts[i], horizon, rng, &res.ops));
    }
    res.decisions = static_cast<std::int64_t>(starts.size()) * horizon;
    std::tie(res.mean, res.std_error) = mean_and_se(res.returns);
    return res;
}

double bound_quality(const ValueFn& value, const std::vector<Belief>& beliefs) {
    if (beliefs.empty()) throw ValidationError("bound quality needs at least one belief");
    double acc = 0.0;
    for (const auto& b : beliefs) acc += value(b);
    return acc / static_cast<double>(beliefs.size());
}

PairedStats paired_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("paired samples differ in length");
    if (a.empty()) throw ValidationError("paired samples are empty");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    PairedStats out;
    std::tie(out.mean_diff, out.std_error) = mean_and_se(d);
    if (out.std_error > 0.0) {
        out.z = out.mean_diff / out.std_error;
    } else if (out.mean_diff != 0.0) {
        out.z = std::copysign(std::numeric_limits<double>::infinity(), out.mean_diff);
    }
    return out;
}

}  // namespace pomdp
