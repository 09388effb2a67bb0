#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qalloc/errors.hpp"

namespace qalloc {

struct KnapsackVariable {
  std::string id;
  double lower = 0.0;
  double upper = 0.0;
};

/// sum_i coefficients[i] * value_i <= budget.
struct KnapsackConstraint {
  std::map<std::string, double> coefficients;
  double budget = 0.0;
  std::string label;
};

struct KnapsackProblem {
  std::vector<KnapsackVariable> variables;
  std::vector<KnapsackConstraint> constraints;
  /// At most one variable of each group may be strictly positive.
  std::vector<std::vector<std::string>> exclusivity_groups;

  /// Throws InvalidBound / InvalidParameter on malformed input.
  void validate() const;
  std::size_t index_of(const std::string& id) const;
};

/// value(lower_id) <= value(upper_id). Tied pairs come from equal upper
/// bounds; they are listed in both directions and never enforced.
struct OrderPair {
  std::string lower_id;
  std::string upper_id;
  bool tied = false;
};

std::vector<OrderPair> priority_order(const KnapsackProblem& problem);

struct EquitableSolution {
  /// In problem variable order.
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> elimination_order;
  std::vector<double> stage_values;
  /// Variables allowed to be positive by the exclusivity branch (empty when
  /// the problem has no groups).
  std::vector<std::string> active;

  double value(const std::string& id) const;
};

/// Every lexicographically optimal solution; solutions.front() is the one
/// selected, further entries tie with it within 1e-9.
struct EquitableResult {
  std::vector<EquitableSolution> solutions;

  const EquitableSolution& best() const { return solutions.front(); }
  bool tied() const { return solutions.size() > 1; }
};

/// Recursive max-min: each stage maximizes the smallest not-yet-fixed value,
/// then fixes one variable that cannot exceed the stage optimum.
EquitableResult lexicographic_maxmin(const KnapsackProblem& problem);

/// Two monotones that cannot both be strictly positive, bounded by their
/// quantum-classical gaps.
KnapsackProblem exclusivity_problem(double gap_n, double gap_m);

inline constexpr double kDefaultNu1 = 1.0;
inline constexpr double kDefaultNu2 = 0.9442;

/// N_AB + 2 N_5 <= 4 - lambda, N_AB in [0, nu1], N_5 in [0, nu2].
KnapsackProblem monogamy_problem(double lambda, double nu1 = kDefaultNu1,
                                 double nu2 = kDefaultNu2);

/// True when x satisfies bounds, knapsack rows and enforced order pairs within tol.
bool is_feasible_point(const KnapsackProblem& problem, const std::vector<double>& x,
                       double tol = 1e-9);

}  // namespace qalloc
