#pragma once

#include <vector>

namespace qalloc::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Dense two-phase simplex with Bland's rule:
///   maximize c.x  subject to  A x <= b,  x >= 0.
/// Rows of A may have negative right-hand sides. Meant for the handful of
/// variables the equitability stages need, not for large models.
Result maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                const std::vector<double>& c);

}  // namespace qalloc::lp
