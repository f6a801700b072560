#include "pomdp/lp.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "pomdp/errors.hpp"

namespace pomdp::lp {

namespace {

// Tableau layout follows the classic dictionary form: rows 0..m-1 are
// constraints, row m is the objective, row m+1 the phase-one objective.
// Column n is the auxiliary variable, column n+1 the right-hand side.
class Tableau {
public:
    Tableau(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
            const std::vector<double>& c, double eps)
        : m_(static_cast<int>(b.size())),
          n_(static_cast<int>(c.size())),
          eps_(eps),
          nonbasic_(n_ + 1),
          basic_(m_),
          d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) d_[i][j] = A[i][j];
            basic_[i] = n_ + i;
            d_[i][n_] = -1.0;
            d_[i][n_ + 1] = b[i];
        }
        for (int j = 0; j < n_; ++j) {
            nonbasic_[j] = j;
            d_[m_][j] = -c[j];
        }
        nonbasic_[n_] = -1;
        d_[m_ + 1][n_] = 1.0;
    }

    Result solve() {
        Result res;
        int r = 0;
        for (int i = 1; i < m_; ++i) {
            if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
        }
        if (m_ > 0 && d_[r][n_ + 1] < -eps_) {
            pivot(r, n_);
            if (!run(2) || d_[m_ + 1][n_ + 1] < -eps_) {
                res.status = Status::kInfeasible;
                return res;
            }
            for (int i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                int s = 0;
                for (int j = 1; j <= n_; ++j) {
                    if (s == -1 || std::make_pair(d_[i][j], nonbasic_[j]) <
                                       std::make_pair(d_[i][s], nonbasic_[s])) {
                        s = j;
                    }
                }
                pivot(i, s);
            }
        }
        const bool bounded = run(1);
        res.x.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            if (basic_[i] < n_ && basic_[i] >= 0) res.x[basic_[i]] = d_[i][n_ + 1];
        }
        res.status = bounded ? Status::kOptimal : Status::kUnbounded;
        res.objective = bounded ? d_[m_][n_ + 1] : std::numeric_limits<double>::infinity();
        return res;
    }

private:
    void pivot(int r, int s) {
        const double inv = 1.0 / d_[r][s];
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r || d_[i][s] == 0.0) continue;
            const double factor = d_[i][s] * inv;
            for (int j = 0; j < n_ + 2; ++j) d_[i][j] -= d_[r][j] * factor;
            d_[i][s] = d_[r][s] * factor;
        }
        for (int j = 0; j < n_ + 2; ++j) {
            if (j != s) d_[r][j] *= inv;
        }
        for (int i = 0; i < m_ + 2; ++i) {
            if (i != r) d_[i][s] *= -inv;
        }
        d_[r][s] = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    bool run(int phase) {
        const int x = m_ + phase - 1;
        // Most negative reduced cost until pivots stall, then Bland's rule,
        // which cannot cycle.
        int stalled = 0;
        for (int guard = 0;; ++guard) {
            if (guard > 50000) throw LpError("simplex iteration limit reached");
            const bool bland = stalled > m_ + n_;
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == -phase) continue;
                if (bland) {
                    if (d_[x][j] < -eps_ && (s == -1 || nonbasic_[j] < nonbasic_[s])) s = j;
                } else if (s == -1 || std::make_pair(d_[x][j], nonbasic_[j]) <
                                          std::make_pair(d_[x][s], nonbasic_[s])) {
                    s = j;
                }
            }
            if (s == -1 || d_[x][s] >= -eps_) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (d_[i][s] <= eps_) continue;
                if (r == -1 || std::make_pair(d_[i][n_ + 1] / d_[i][s], basic_[i]) <
                                   std::make_pair(d_[r][n_ + 1] / d_[r][s], basic_[r])) {
                    r = i;
                }
            }
            if (r == -1) return false;
            stalled = d_[r][n_ + 1] / d_[r][s] <= eps_ ? stalled + 1 : 0;
            pivot(r, s);
        }
    }

    int m_, n_;
    double eps_;
    std::vector<int> nonbasic_, basic_;
    std::vector<std::vector<double>> d_;
};

}  // namespace

Result maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                const std::vector<double>& c, double eps) {
    Tableau t(A, b, c, eps);
    return t.solve();
}

}  // namespace pomdp::lp
