#pragma once

#include <vector>

namespace pomdp::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Result {
    Status status = Status::kInfeasible;
    double objective = 0.0;
    std::vector<double> x;
};

/// Dense two-phase simplex (most-negative reduced cost, index tie-breaking,
/// Bland's rule after a run of degenerate pivots):
///   maximize c.x  subject to  A x <= b,  x >= 0.
/// Negative entries in b are handled by the phase-one auxiliary variable.
/// Equality constraints are expressed as two opposing inequalities.
Result maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                const std::vector<double>& c, double eps = 1e-9);

}  // namespace pomdp::lp
