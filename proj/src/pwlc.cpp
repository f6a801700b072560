#include "pomdp/pwlc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pomdp/errors.hpp"
#include "pomdp/lp.hpp"

namespace pomdp {

double PwlcFn::operator()(const Belief& b) const { return eval_pwlc(*this, b).value; }

PwlcEval eval_pwlc(const PwlcFn& f, const Belief& b) {
    PwlcEval best{-std::numeric_limits<double>::infinity(), -1};
    for (std::size_t i = 0; i < f.vectors.size(); ++i) {
        const double v = f.vectors[i].value(b);
        if (v > best.value) best = {v, static_cast<int>(i)};
    }
    return best;
}

PwlcFn constant_pwlc(int num_states, double value, int action) {
    PwlcFn f;
    f.vectors.push_back({std::vector<double>(static_cast<std::size_t>(num_states), value), action, {}});
    return f;
}

Domination dominates_lp(std::span<const double> alpha, std::span<const AlphaVector> others, double tol) {
    const int n = static_cast<int>(alpha.size());
    Domination out;
    if (others.empty()) {
        out.useful = true;
        out.margin = std::numeric_limits<double>::infinity();
        const auto it = std::max_element(alpha.begin(), alpha.end());
        out.witness = extreme_belief(n, static_cast<int>(it - alpha.begin()));
        return out;
    }

    double scale = 0.0;
    for (const auto& o : others) {
        for (int s = 0; s < n; ++s) scale = std::max(scale, std::abs(o.coeffs[s] - alpha[s]));
    }
    if (scale == 0.0) {
        out.margin = 0.0;
        out.useful = 0.0 > tol;
        out.witness = uniform_belief(n);
        return out;
    }

    // Variables: b_0..b_{n-1}, e = d/scale + 2 >= 0 (d/scale lies in [-1, 1]).
    const double shift = 2.0;
    const int m = static_cast<int>(others.size());
    std::vector<std::vector<double>> A;
    std::vector<double> rhs;
    A.reserve(static_cast<std::size_t>(m) + 2);
    for (const auto& o : others) {
        std::vector<double> row(static_cast<std::size_t>(n) + 1);
        for (int s = 0; s < n; ++s) row[s] = (o.coeffs[s] - alpha[s]) / scale;
        row[n] = 1.0;
        A.push_back(std::move(row));
        rhs.push_back(shift);
    }
    std::vector<double> ones(static_cast<std::size_t>(n) + 1, 1.0), neg(static_cast<std::size_t>(n) + 1, -1.0);
    ones[n] = 0.0;
    neg[n] = 0.0;
    A.push_back(ones);
    rhs.push_back(1.0);
    A.push_back(neg);
    rhs.push_back(-1.0);
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[n] = 1.0;

    const lp::Result res = lp::maximize(A, rhs, c);
    if (res.status != lp::Status::kOptimal) throw LpError("domination LP did not reach an optimum");

    Belief b(res.x.begin(), res.x.begin() + n);
    double sum = 0.0;
    for (double& x : b) {
        x = std::max(x, 0.0);
        sum += x;
    }
    if (sum <= 0.0) throw LpError("domination LP returned an empty belief");
    for (double& x : b) x /= sum;

    // Recompute the margin at the returned belief; this is exact for the witness.
    double margin = std::numeric_limits<double>::infinity();
    const double own = dot(alpha, b);
    for (const auto& o : others) margin = std::min(margin, own - o.value(b));
    const double lp_margin = (res.objective - shift) * scale;
    // Long pivot runs over tens of thousands of rows drift past 1e-7 of the
    // scale; only a gap far beyond that means the solve broke down.
    if (std::abs(margin - lp_margin) > 1e-5 * std::max(1.0, scale)) {
        throw LpError("domination LP solution is inconsistent");
    }
    out.margin = margin;
    // When the optimum and the verified witness disagree, keep the vector:
    // a redundant vector costs time, a dropped useful one costs value.
    out.useful = margin > tol || lp_margin > tol;
    out.witness = std::move(b);
    return out;
}

PwlcFn dedupe(const PwlcFn& f) {
    PwlcFn out;
    for (const auto& v : f.vectors) {
        const bool dup = std::any_of(out.vectors.begin(), out.vectors.end(), [&](const AlphaVector& w) {
            for (std::size_t s = 0; s < v.coeffs.size(); ++s) {
                if (std::abs(v.coeffs[s] - w.coeffs[s]) > 1e-12) return false;
            }
            return true;
        });
        if (!dup) out.vectors.push_back(v);
    }
    return out;
}

PwlcFn remove_pointwise_dominated(const PwlcFn& f) {
    const std::size_t k = f.vectors.size();
    std::vector<bool> removed(k, false);
    auto geq = [](const AlphaVector& w, const AlphaVector& v) {
        for (std::size_t s = 0; s < v.coeffs.size(); ++s) {
            if (w.coeffs[s] < v.coeffs[s]) return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k && !removed[i]; ++j) {
            if (i == j || removed[j]) continue;
            // On exact equality keep the lower index.
            if (geq(f.vectors[j], f.vectors[i]) && (j < i || !geq(f.vectors[i], f.vectors[j]))) removed[i] = true;
        }
    }
    PwlcFn out;
    for (std::size_t i = 0; i < k; ++i) {
        if (!removed[i]) out.vectors.push_back(f.vectors[i]);
    }
    return out;
}

PwlcFn prune(const PwlcFn& f, double tol) {
    PwlcFn cur = remove_pointwise_dominated(dedupe(f));
    const std::size_t k = cur.vectors.size();
    if (k <= 1) return cur;
    const int n = cur.num_states();

    // Beliefs at which some vector was shown strictly best; cheap certificates
    // that avoid most LPs.
    std::vector<Belief> probes;
    for (int s = 0; s < n; ++s) probes.push_back(extreme_belief(n, s));

    std::vector<bool> keep(k, true);
    std::vector<AlphaVector> others;
    for (std::size_t i = 0; i < k; ++i) {
        others.clear();
        for (std::size_t j = 0; j < k; ++j) {
            if (j != i && keep[j]) others.push_back(cur.vectors[j]);
        }
        if (others.empty()) continue;
        bool certified = false;
        for (const auto& b : probes) {
            const double own = cur.vectors[i].value(b);
            double best_other = -std::numeric_limits<double>::infinity();
            for (const auto& o : others) best_other = std::max(best_other, o.value(b));
            if (own - best_other > tol) {
                certified = true;
                break;
            }
        }
        if (certified) continue;
        const Domination d = dominates_lp(cur.vectors[i].coeffs, others, tol);
        if (d.useful) {
            probes.push_back(d.witness);
        } else {
            keep[i] = false;
        }
    }
    PwlcFn out;
    for (std::size_t i = 0; i < k; ++i) {
        if (keep[i]) out.vectors.push_back(std::move(cur.vectors[i]));
    }
    return out;
}

double pwlc_sup_diff(const PwlcFn& f, const PwlcFn& g) {
    if (f.empty() || g.empty()) throw ValidationError("sup difference of an empty PWLC function");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : f.vectors) best = std::max(best, dominates_lp(v.coeffs, g.vectors).margin);
    return best;
}

double pwlc_distance(const PwlcFn& f, const PwlcFn& g) {
    return std::max(pwlc_sup_diff(f, g), pwlc_sup_diff(g, f));
}

AccuracyBounds accuracy_bounds(double eps, double discount, int k) {
    AccuracyBounds out;
    out.value_i = discount * eps / (1.0 - discount);
    out.value_iminus1 = eps / (1.0 - discount);
    out.lookahead_k = 2.0 * eps * std::pow(discount, k) / (1.0 - discount);
    out.direct = 2.0 * eps / (1.0 - discount);
    return out;
}

double bound_gap_accuracy(double eps, double discount) {
    return eps * (2.0 - discount) / (1.0 - discount);
}

}  // namespace pomdp
