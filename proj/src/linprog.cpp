#include "qalloc/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "qalloc/errors.hpp"

namespace qalloc::lp {

namespace {

constexpr double kEps = 1e-11;

// Tableau layout: rows 0..m-1 constraints, row m objective, row m+1 phase-one
// objective. Column n is the auxiliary variable, column n+1 the right-hand side.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
          const std::vector<double>& c)
      : m_(b.size()), n_(c.size()), basis_(m_), nonbasis_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) d_[i][j] = A[i][j];
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b[i];
      basis_[i] = static_cast<long>(n_ + i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = static_cast<long>(j);
      d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  Result solve() {
    Result result;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!simplex(1) || d_[m_ + 1][n_ + 1] < -kEps) {
        result.status = Status::Infeasible;
        return result;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j) {
          if (d_[i][j] < d_[i][s] || (d_[i][j] == d_[i][s] && nonbasis_[j] < nonbasis_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    if (!simplex(2)) {
      result.status = Status::Unbounded;
      return result;
    }
    result.status = Status::Optimal;
    result.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) {
        result.x[static_cast<std::size_t>(basis_[i])] = d_[i][n_ + 1];
      }
    }
    result.objective = d_[m_][n_ + 1];
    return result;
  }

 private:
  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / d_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = d_[i][s] * inv;
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_ + 2; ++j) {
        if (j != s) d_[i][j] -= d_[r][j] * f;
      }
      d_[i][s] = -f;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j) {
      if (j != s) d_[r][j] *= inv;
    }
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool simplex(int phase) {
    const std::size_t obj = phase == 1 ? m_ + 1 : m_;
    for (;;) {
      // Bland's rule: lowest-labelled improving column, then lowest-labelled
      // leaving row among ratio ties. Slow but never cycles.
      long s = -1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (d_[obj][j] >= -kEps) continue;
        if (s == -1 || nonbasis_[j] < nonbasis_[static_cast<std::size_t>(s)]) s = static_cast<long>(j);
      }
      if (s == -1) return true;
      const auto sc = static_cast<std::size_t>(s);
      long r = -1;
      for (std::size_t i = 0; i < m_; ++i) {
        if (d_[i][sc] < kEps) continue;
        if (r == -1) {
          r = static_cast<long>(i);
          continue;
        }
        const auto rc = static_cast<std::size_t>(r);
        const double lhs = d_[i][n_ + 1] / d_[i][sc];
        const double rhs = d_[rc][n_ + 1] / d_[rc][sc];
        const double slack = kEps * std::max(1.0, std::abs(rhs));
        if (lhs < rhs - slack || (lhs <= rhs + slack && basis_[i] < basis_[rc])) r = static_cast<long>(i);
      }
      if (r == -1) return false;
      pivot(static_cast<std::size_t>(r), sc);
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<long> basis_;
  std::vector<long> nonbasis_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

Result maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                const std::vector<double>& c) {
  if (A.size() != b.size()) fail(ErrorCode::Shape, "LP row count mismatch");
  for (const auto& row : A) {
    if (row.size() != c.size()) fail(ErrorCode::Shape, "LP column count mismatch");
  }
  return Tableau(A, b, c).solve();
}

}  // namespace qalloc::lp
