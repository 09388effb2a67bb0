#include "qalloc/equitability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qalloc/linprog.hpp"

namespace qalloc {

namespace {

constexpr double kTieTol = 1e-9;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// One exclusivity branch: per-variable effective upper bounds.
struct Branch {
  std::vector<double> upper;
  std::vector<std::string> active;
};

std::vector<Branch> enumerate_branches(const KnapsackProblem& problem) {
  Branch base;
  for (const auto& v : problem.variables) base.upper.push_back(v.upper);
  std::vector<Branch> branches = {base};
  for (const auto& group : problem.exclusivity_groups) {
    std::vector<Branch> next;
    for (const auto& b : branches) {
      // One branch per allowed positive member, plus the all-zero branch.
      for (std::size_t pick = 0; pick <= group.size(); ++pick) {
        Branch nb = b;
        for (std::size_t g = 0; g < group.size(); ++g) {
          if (g == pick) continue;
          nb.upper[problem.index_of(group[g])] = 0.0;
        }
        if (pick < group.size()) nb.active.push_back(group[pick]);
        next.push_back(std::move(nb));
      }
    }
    branches = std::move(next);
  }
  return branches;
}

// LP over y = x - L (and optionally t, the stage minimum, as last column).
struct StageLp {
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  void add(std::vector<double> row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
};

class BranchSolver {
 public:
  BranchSolver(const KnapsackProblem& problem, const Branch& branch,
               const std::vector<OrderPair>& order)
      : problem_(problem), branch_(branch), n_(problem.variables.size()) {
    for (const auto& p : order) {
      if (!p.tied) enforced_.emplace_back(problem.index_of(p.lower_id), problem.index_of(p.upper_id));
    }
  }

  std::optional<EquitableSolution> solve() {
    std::vector<std::optional<double>> fixed(n_);
    EquitableSolution sol;
    sol.active = branch_.active;
    for (std::size_t stage = 0; stage < n_; ++stage) {
      // Stage optimum: maximize t with every free variable >= t.
      const auto lp = build(fixed, std::nullopt, true);
      std::vector<double> c(n_ + 1, 0.0);
      c[n_] = 1.0;
      const auto r = lp::maximize(lp.rows, lp.rhs, c);
      if (r.status == lp::Status::Infeasible) return std::nullopt;
      if (r.status == lp::Status::Unbounded) {
        fail(ErrorCode::InvalidBound, "stage problem is unbounded");
      }
      const double t = r.objective;

      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!fixed[i]) free.push_back(i);
      }
      std::sort(free.begin(), free.end(), [&](std::size_t a, std::size_t b) {
        const auto& va = problem_.variables[a];
        const auto& vb = problem_.variables[b];
        if (va.upper != vb.upper) return va.upper < vb.upper;
        return va.id < vb.id;
      });

      // Fix the first variable (in tie-break order) that cannot exceed t.
      std::size_t chosen = free.front();
      double best_headroom = std::numeric_limits<double>::infinity();
      for (std::size_t i : free) {
        const auto probe = build(fixed, t, false);
        std::vector<double> ci(n_, 0.0);
        ci[i] = 1.0;
        const auto pr = lp::maximize(probe.rows, probe.rhs, ci);
        const double reach = pr.status == lp::Status::Optimal
                                 ? problem_.variables[i].lower + pr.objective
                                 : t;
        const double headroom = reach - t;
        if (headroom <= kTieTol) {
          chosen = i;
          break;
        }
        if (headroom < best_headroom) {
          best_headroom = headroom;
          chosen = i;
        }
      }
      fixed[chosen] = t;
      sol.elimination_order.push_back(problem_.variables[chosen].id);
      sol.stage_values.push_back(t);
    }
    for (std::size_t i = 0; i < n_; ++i) sol.values.emplace_back(problem_.variables[i].id, *fixed[i]);
    return sol;
  }

 private:
  // with_t: include t as a decision column (x_free >= t).
  // floor:  otherwise impose x_free >= floor for every free variable.
  StageLp build(const std::vector<std::optional<double>>& fixed, std::optional<double> floor,
                bool with_t) const {
    const std::size_t cols = n_ + (with_t ? 1 : 0);
    StageLp lp;
    auto row = [&] { return std::vector<double>(cols, 0.0); };
    const auto& vars = problem_.variables;

    for (const auto& con : problem_.constraints) {
      auto r = row();
      double b = con.budget;
      for (const auto& [id, coef] : con.coefficients) {
        const std::size_t i = problem_.index_of(id);
        r[i] = coef;
        b -= coef * vars[i].lower;
      }
      lp.add(std::move(r), b);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      auto r = row();
      r[i] = 1.0;
      lp.add(std::move(r), branch_.upper[i] - vars[i].lower);
    }
    for (const auto& [lo, hi] : enforced_) {
      auto r = row();
      r[lo] = 1.0;
      r[hi] = -1.0;
      lp.add(std::move(r), vars[hi].lower - vars[lo].lower);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (fixed[i]) {
        const double y = *fixed[i] - vars[i].lower;
        auto up = row();
        up[i] = 1.0;
        lp.add(std::move(up), y);
        auto down = row();
        down[i] = -1.0;
        lp.add(std::move(down), -y);
      } else if (with_t) {
        auto r = row();
        r[i] = -1.0;
        r[n_] = 1.0;
        lp.add(std::move(r), vars[i].lower);
      } else if (floor) {
        auto r = row();
        r[i] = -1.0;
        lp.add(std::move(r), vars[i].lower - *floor);
      }
    }
    return lp;
  }

  const KnapsackProblem& problem_;
  const Branch& branch_;
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> enforced_;
};

std::vector<double> sorted_values(const EquitableSolution& s) {
  std::vector<double> v;
  for (const auto& [id, x] : s.values) v.push_back(x);
  std::sort(v.begin(), v.end());
  return v;
}

// +1 if a is lexicographically better (larger sorted vector), -1 if worse, 0 if tied.
int compare_leximin(const EquitableSolution& a, const EquitableSolution& b) {
  const auto va = sorted_values(a);
  const auto vb = sorted_values(b);
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i] > vb[i] + kTieTol) return 1;
    if (va[i] < vb[i] - kTieTol) return -1;
  }
  return 0;
}

bool same_point(const EquitableSolution& a, const EquitableSolution& b) {
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (std::abs(a.values[i].second - b.values[i].second) > kTieTol) return false;
  }
  return true;
}

}  // namespace

std::size_t KnapsackProblem::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].id == id) return i;
  }
  fail(ErrorCode::InvalidParameter, "unknown variable id '" + id + "'");
}

void KnapsackProblem::validate() const {
  if (variables.empty()) fail(ErrorCode::InvalidParameter, "problem has no variables");
  std::set<std::string> ids;
  for (const auto& v : variables) {
    if (v.id.empty()) fail(ErrorCode::InvalidParameter, "variable id must be non-empty");
    if (!ids.insert(v.id).second) fail(ErrorCode::InvalidParameter, "duplicate variable id '" + v.id + "'");
    if (!finite_nonneg(v.lower) || !std::isfinite(v.upper) || v.upper < v.lower) {
      fail(ErrorCode::InvalidBound, "variable '" + v.id + "' needs 0 <= lower <= upper");
    }
  }
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& con = constraints[k];
    if (!finite_nonneg(con.budget)) {
      fail(ErrorCode::InvalidBound, "constraint " + std::to_string(k) + " has a negative budget");
    }
    for (const auto& [id, coef] : con.coefficients) {
      if (!ids.count(id)) fail(ErrorCode::InvalidParameter, "constraint references unknown id '" + id + "'");
      if (!finite_nonneg(coef)) {
        fail(ErrorCode::InvalidBound, "constraint " + std::to_string(k) + " has a negative coefficient");
      }
    }
  }
  for (const auto& group : exclusivity_groups) {
    std::set<std::string> members;
    for (const auto& id : group) {
      if (!ids.count(id)) fail(ErrorCode::InvalidParameter, "exclusivity group references unknown id '" + id + "'");
      if (!members.insert(id).second) fail(ErrorCode::InvalidParameter, "exclusivity group repeats '" + id + "'");
    }
  }
}

double EquitableSolution::value(const std::string& id) const {
  for (const auto& [k, v] : values) {
    if (k == id) return v;
  }
  fail(ErrorCode::InvalidParameter, "no value for id '" + id + "'");
}

std::vector<OrderPair> priority_order(const KnapsackProblem& problem) {
  std::vector<OrderPair> out;
  const auto& vars = problem.variables;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (i == j) continue;
      if (vars[i].upper < vars[j].upper) {
        out.push_back({vars[i].id, vars[j].id, false});
      } else if (vars[i].upper == vars[j].upper) {
        out.push_back({vars[i].id, vars[j].id, true});
      }
    }
  }
  return out;
}

bool is_feasible_point(const KnapsackProblem& problem, const std::vector<double>& x, double tol) {
  if (x.size() != problem.variables.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < problem.variables[i].lower - tol || x[i] > problem.variables[i].upper + tol) return false;
  }
  for (const auto& con : problem.constraints) {
    double lhs = 0.0;
    for (const auto& [id, coef] : con.coefficients) lhs += coef * x[problem.index_of(id)];
    if (lhs > con.budget + tol) return false;
  }
  for (const auto& p : priority_order(problem)) {
    if (p.tied) continue;
    if (x[problem.index_of(p.lower_id)] > x[problem.index_of(p.upper_id)] + tol) return false;
  }
  for (const auto& group : problem.exclusivity_groups) {
    std::size_t positive = 0;
    for (const auto& id : group) {
      if (x[problem.index_of(id)] > tol) ++positive;
    }
    if (positive > 1) return false;
  }
  return true;
}

EquitableResult lexicographic_maxmin(const KnapsackProblem& problem) {
  problem.validate();
  for (std::size_t k = 0; k < problem.constraints.size(); ++k) {
    const auto& con = problem.constraints[k];
    double lhs = 0.0;
    for (const auto& [id, coef] : con.coefficients) lhs += coef * problem.variables[problem.index_of(id)].lower;
    if (lhs > con.budget + kTieTol) {
      const std::string name = con.label.empty() ? "#" + std::to_string(k) : "'" + con.label + "'";
      fail(ErrorCode::Infeasible, "lower bounds violate knapsack constraint " + name + ": " +
                                      std::to_string(lhs) + " > " + std::to_string(con.budget));
    }
  }

  const auto order = priority_order(problem);
  std::vector<EquitableSolution> found;
  for (const auto& branch : enumerate_branches(problem)) {
    bool possible = true;
    for (std::size_t i = 0; i < problem.variables.size(); ++i) {
      if (branch.upper[i] < problem.variables[i].lower) possible = false;
    }
    if (!possible) continue;
    if (auto sol = BranchSolver(problem, branch, order).solve()) found.push_back(std::move(*sol));
  }
  if (found.empty()) {
    fail(ErrorCode::Infeasible,
         problem.exclusivity_groups.empty()
             ? "no point satisfies the bounds together with the priority order constraints"
             : "no exclusivity branch admits a feasible point");
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (compare_leximin(found[i], found[best]) > 0) best = i;
  }
  EquitableResult result;
  result.solutions.push_back(found[best]);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (i == best || compare_leximin(found[i], found[best]) != 0) continue;
    const bool duplicate = std::any_of(result.solutions.begin(), result.solutions.end(),
                                       [&](const EquitableSolution& s) { return same_point(s, found[i]); });
    if (!duplicate) result.solutions.push_back(found[i]);
  }
  return result;
}

KnapsackProblem exclusivity_problem(double gap_n, double gap_m) {
  if (!finite_nonneg(gap_n) || !finite_nonneg(gap_m)) {
    fail(ErrorCode::InvalidBound, "quantum-classical gaps must be >= 0");
  }
  KnapsackProblem p;
  p.variables = {{"N_n", 0.0, gap_n}, {"N_m", 0.0, gap_m}};
  p.exclusivity_groups = {{"N_n", "N_m"}};
  return p;
}

KnapsackProblem monogamy_problem(double lambda, double nu1, double nu2) {
  if (!(lambda >= 0.0 && lambda < 4.0)) {
    fail(ErrorCode::InvalidParameter, "lambda must lie in [0, 4)");
  }
  if (!(nu1 > 0.0) || !(nu2 > 0.0) || !std::isfinite(nu1) || !std::isfinite(nu2)) {
    fail(ErrorCode::InvalidBound, "nu1 and nu2 must be positive");
  }
  KnapsackProblem p;
  p.variables = {{"N_AB", 0.0, nu1}, {"N_5", 0.0, nu2}};
  p.constraints = {{{{"N_AB", 1.0}, {"N_5", 2.0}}, 4.0 - lambda, "monogamy"}};
  return p;
}

}  // namespace qalloc
