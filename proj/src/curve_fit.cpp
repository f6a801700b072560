#include "pomdp/curve_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pomdp/errors.hpp"

namespace pomdp {

namespace {

constexpr double kWeightOverflow = 1e12;

bool weights_ok(const std::vector<std::vector<double>>& w) {
    for (const auto& row : w) {
        for (double x : row) {
            if (!std::isfinite(x) || std::abs(x) > kWeightOverflow) return false;
        }
    }
    return true;
}

bool model_ok(const FitModel& mdl) {
    return std::visit([](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, LinearQModel>) {
            return weights_ok(x.weights);
        } else {
            return weights_ok(x.vectors);
        }
    }, mdl);
}

std::vector<double> inner_products(const SoftmaxModel& mdl, const Belief& b) {
    if (mdl.vectors.empty()) throw ValidationError("softmax model has no vectors");
    std::vector<double> p;
    p.reserve(mdl.vectors.size());
    for (const auto& v : mdl.vectors) {
        const double x = dot(v, b);
        if (!(x > 0.0)) throw std::domain_error("softmax inner product is not positive; shift rewards");
        p.push_back(x);
    }
    return p;
}

// (sum p_j^k)^(1/k), scaled by the largest term to avoid overflow.
double soft_norm(const std::vector<double>& p, double k) {
    const double top = *std::max_element(p.begin(), p.end());
    double acc = 0.0;
    for (double x : p) acc += std::pow(x / top, k);
    return top * std::pow(acc, 1.0 / k);
}

double probe_error(const Pomdp& m, const FitModel& mdl, const FitConfig& cfg) {
    if (cfg.probes.empty()) return 0.0;
    const ValueFn v = [&mdl](const Belief& b) { return fit_value(mdl, b); };
    double acc = 0.0;
    for (const auto& b : cfg.probes) {
        const double target = cfg.reference ? cfg.reference(b) : [&] {
            const auto t = action_targets(m, v, b);
            return *std::max_element(t.begin(), t.end());
        }();
        acc += std::abs(v(b) - target);
    }
    return acc / static_cast<double>(cfg.probes.size());
}

std::vector<int> shuffled(std::size_t n, Rng& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

}  // namespace

double LinearQModel::operator()(const Belief& b) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& w : weights) best = std::max(best, dot(w, b));
    return best;
}

PwlcFn LinearQModel::as_pwlc() const {
    PwlcFn f;
    for (int a = 0; a < num_actions(); ++a) f.vectors.push_back({weights[a], a, {}});
    return f;
}

LinearQModel linear_q_from_pwlc(const PwlcFn& f, int num_actions) {
    LinearQModel mdl;
    mdl.weights.resize(static_cast<std::size_t>(num_actions));
    for (const auto& v : f.vectors) {
        if (v.action < 0 || v.action >= num_actions) throw ValidationError("linear Q seed needs action tags");
        if (!mdl.weights[v.action].empty()) throw ValidationError("linear Q seed has two vectors for one action");
        mdl.weights[v.action] = v.coeffs;
    }
    for (const auto& w : mdl.weights) {
        if (w.empty()) throw ValidationError("linear Q seed misses an action");
    }
    return mdl;
}

double SoftmaxModel::operator()(const Belief& b) const { return softmax_eval(*this, b); }

SoftmaxModel softmax_from_pwlc(const PwlcFn& f, int count, double k, Rng& rng, double jitter) {
    if (f.empty() || count < 1) throw ValidationError("softmax seed needs vectors and a positive count");
    if (!(k >= 1.0) || !std::isfinite(k)) throw ValidationError("softmax temperature must be finite and >= 1");
    SoftmaxModel mdl;
    mdl.k = k;
    std::vector<int> copies(f.size(), 0);
    for (int j = 0; j < count; ++j) ++copies[j % f.size()];
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int j = 0; j < count; ++j) {
        const std::size_t src = j % f.size();
        const double scale = std::pow(static_cast<double>(copies[src]), -1.0 / k);
        std::vector<double> v = f.vectors[src].coeffs;
        for (double& x : v) x *= scale * (1.0 + jitter * unif(rng));
        mdl.vectors.push_back(std::move(v));
    }
    return mdl;
}

double softmax_eval(const SoftmaxModel& mdl, const Belief& b) { return soft_norm(inner_products(mdl, b), mdl.k); }

std::vector<std::vector<double>> softmax_gradient(const SoftmaxModel& mdl, const Belief& b) {
    const auto p = inner_products(mdl, b);
    const double v = soft_norm(p, mdl.k);
    std::vector<std::vector<double>> g(mdl.vectors.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        // V^(1-k) p^(k-1) = (p / V)^(k-1)
        const double c = std::pow(p[j] / v, mdl.k - 1.0);
        g[j].resize(b.size());
        for (std::size_t s = 0; s < b.size(); ++s) g[j][s] = c * b[s];
    }
    return g;
}

void delta_step(LinearQModel& mdl, int action, const Belief& b, double y, double rate) {
    if (!(rate > 0.0)) throw ValidationError("learning rate must be positive");
    auto& w = mdl.weights[action];
    const double residual = dot(w, b) - y;
    for (std::size_t s = 0; s < w.size(); ++s) w[s] -= rate * residual * b[s];
}

void delta_step(SoftmaxModel& mdl, const Belief& b, double y, double rate) {
    if (!(rate > 0.0)) throw ValidationError("learning rate must be positive");
    const double residual = softmax_eval(mdl, b) - y;
    const auto g = softmax_gradient(mdl, b);
    for (std::size_t j = 0; j < g.size(); ++j) {
        for (std::size_t s = 0; s < b.size(); ++s) {
            mdl.vectors[j][s] = std::max(mdl.vectors[j][s] - rate * residual * g[j][s], kSoftmaxFloor);
        }
    }
}

std::vector<double> action_targets(const Pomdp& m, const ValueFn& value, const Belief& b) {
    std::vector<double> out(static_cast<std::size_t>(m.num_actions()));
    Belief next;
    for (int a = 0; a < m.num_actions(); ++a) {
        const Belief pred = predict(m, b, a);
        double future = 0.0;
        for (int o = 0; o < m.num_obs(); ++o) {
            double p = 0.0;
            for (int sp = 0; sp < m.num_states(); ++sp) p += m.obs(a, sp, o) * pred[sp];
            if (p <= kImpossibleObsTol) continue;
            if (!belief_update_from_prediction(m, pred, a, o, next)) continue;
            future += p * value(next);
        }
        out[a] = expected_reward(m, b, a) + m.discount() * future;
    }
    return out;
}

LinearFit fit_linear_q(const Pomdp& m, const ValueFn& prev, const std::vector<Belief>& samples) {
    if (samples.empty()) throw ValidationError("least-squares fit needs samples");
    const int n = m.num_states(), na = m.num_actions();
    const auto rows = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd x(rows, n);
    Eigen::MatrixXd y(rows, na);
    for (Eigen::Index j = 0; j < rows; ++j) {
        const Belief& b = samples[static_cast<std::size_t>(j)];
        validate_belief(b, n);
        for (int s = 0; s < n; ++s) x(j, s) = b[s];
        const auto t = action_targets(m, prev, b);
        for (int a = 0; a < na; ++a) y(j, a) = t[a];
    }
    LinearFit fit;
    Eigen::MatrixXd w;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() == n) {
        // Normal equations (X'X) w = X'y.
        const Eigen::MatrixXd gram = x.transpose() * x;
        w = gram.llt().solve(x.transpose() * y);
    } else {
        fit.rank_deficient = true;
        w = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(x).solve(y);
    }
    fit.model.weights.assign(static_cast<std::size_t>(na), std::vector<double>(static_cast<std::size_t>(n)));
    for (int a = 0; a < na; ++a) {
        for (int s = 0; s < n; ++s) fit.model.weights[a][s] = w(s, a);
    }
    return fit;
}

double fit_value(const FitModel& mdl, const Belief& b) {
    return std::visit([&b](const auto& x) { return x(b); }, mdl);
}

ValueFn fit_value_fn(FitModel mdl) {
    return [mdl = std::move(mdl)](const Belief& b) { return fit_value(mdl, b); };
}

std::int64_t fit_value_cost(const FitModel& mdl) {
    return std::visit([](const auto& x) -> std::int64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, LinearQModel>) {
            return x.num_actions();
        } else {
            return static_cast<std::int64_t>(x.vectors.size());
        }
    }, mdl);
}

double RateSchedule::at(long step, long total) const {
    if (total <= 1) return start;
    const double t = static_cast<double>(step) / static_cast<double>(total - 1);
    return start + (end - start) * std::clamp(t, 0.0, 1.0);
}

FitResult fit_scheme(const Pomdp& m, const FitModel& init, const std::vector<Belief>& samples,
                     const FitConfig& cfg, Rng& rng) {
    if (cfg.epochs < 0 || cfg.sweeps < 1) throw ValidationError("fit needs epochs >= 0 and sweeps >= 1");
    if (!(cfg.rate.start > 0.0) || !(cfg.rate.end > 0.0)) throw ValidationError("learning rates must be positive");
    if (samples.empty() && cfg.epochs > 0) throw ValidationError("fit needs samples");
    FitResult res{init, {}, 0, false};
    const long gs_total = static_cast<long>(cfg.epochs) * static_cast<long>(samples.size());
    long gs_step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        FitModel next = res.model;
        try {
            if (cfg.scheme == FitScheme::kSynchronous) {
                const ValueFn frozen = fit_value_fn(res.model);
                if (std::holds_alternative<LinearQModel>(next)) {
                    next = fit_linear_q(m, frozen, samples).model;
                } else {
                    auto& sm = std::get<SoftmaxModel>(next);
                    std::vector<double> y;
                    for (const auto& b : samples) {
                        const auto t = action_targets(m, frozen, b);
                        y.push_back(*std::max_element(t.begin(), t.end()));
                    }
                    const long total = static_cast<long>(cfg.sweeps) * static_cast<long>(samples.size());
                    long step = 0;
                    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
                        for (int j : shuffled(samples.size(), rng)) {
                            delta_step(sm, samples[j], y[j], cfg.rate.at(step++, total));
                        }
                    }
                }
            } else {
                for (int j : shuffled(samples.size(), rng)) {
                    const double rate = cfg.rate.at(gs_step++, gs_total);
                    const Belief& b = samples[j];
                    if (auto* lq = std::get_if<LinearQModel>(&next)) {
                        const auto t = action_targets(m, [lq](const Belief& x) { return (*lq)(x); }, b);
                        for (int a = 0; a < m.num_actions(); ++a) delta_step(*lq, a, b, t[a], rate);
                    } else {
                        auto& sm = std::get<SoftmaxModel>(next);
                        const auto t = action_targets(m, [&sm](const Belief& x) { return softmax_eval(sm, x); }, b);
                        delta_step(sm, b, *std::max_element(t.begin(), t.end()), rate);
                    }
                    if (!model_ok(next)) break;
                }
            }
        } catch (const std::domain_error&) {
            res.diverged = true;
            break;
        }
        if (!model_ok(next)) {
            res.diverged = true;
            break;
        }
        double err = 0.0;
        try {
            err = probe_error(m, next, cfg);
        } catch (const std::domain_error&) {
            res.diverged = true;
            break;
        }
        if (!std::isfinite(err)) {
            res.diverged = true;
            break;
        }
        res.model = std::move(next);
        res.probe_error.push_back(err);
        ++res.epochs_run;
    }
    return res;
}

double softmax_reward_shift(const Pomdp& m) {
    const auto& rho = m.rho_table();
    const double lo = *std::min_element(rho.begin(), rho.end());
    return lo > 0.0 ? 0.0 : 1.0 - lo;
}

Pomdp shift_rewards(const Pomdp& m, double c) {
    const int n = m.num_states(), na = m.num_actions(), no = m.num_obs();
    using Table = std::vector<std::vector<std::vector<double>>>;
    Table t(na, std::vector<std::vector<double>>(n, std::vector<double>(n)));
    Table o(na, std::vector<std::vector<double>>(n, std::vector<double>(no)));
    Table r = t;
    for (int a = 0; a < na; ++a) {
        for (int s = 0; s < n; ++s) {
            for (int sp = 0; sp < n; ++sp) {
                t[a][s][sp] = m.trans(s, a, sp);
                r[a][s][sp] = m.reward(s, a, sp) + c;
            }
            for (int k = 0; k < no; ++k) o[a][s][k] = m.obs(a, s, k);
        }
    }
    Pomdp out(std::move(t), std::move(o), std::move(r), m.discount());
    out.state_names = m.state_names;
    out.action_names = m.action_names;
    out.obs_names = m.obs_names;
    return out;
}

}  // namespace pomdp
