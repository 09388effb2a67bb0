#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qalloc/equitability.hpp"
#include "qalloc/errors.hpp"

using namespace qalloc;

namespace {

KnapsackProblem box(std::vector<KnapsackVariable> vars, std::vector<KnapsackConstraint> cons = {}) {
  KnapsackProblem p;
  p.variables = std::move(vars);
  p.constraints = std::move(cons);
  return p;
}

std::vector<double> values_of(const EquitableSolution& s) {
  std::vector<double> v;
  for (const auto& [id, x] : s.values) v.push_back(x);
  return v;
}

// Oracle feasibility, written against the problem definition only.
bool oracle_feasible(const KnapsackProblem& p, const std::vector<double>& x, double tol = 1e-12) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < p.variables[i].lower - tol || x[i] > p.variables[i].upper + tol) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (p.variables[i].upper < p.variables[j].upper && x[i] > x[j] + tol) return false;
    }
  }
  for (const auto& c : p.constraints) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto it = c.coefficients.find(p.variables[i].id);
      if (it != c.coefficients.end()) lhs += it->second * x[i];
    }
    if (lhs > c.budget + tol) return false;
  }
  return true;
}

// +1 if a is lexicographically larger than b beyond tol, -1 if smaller, 0 if tied.
int lex_compare(std::vector<double> a, std::vector<double> b, double tol) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + tol) return 1;
    if (a[i] < b[i] - tol) return -1;
  }
  return 0;
}

// Walks every point of the pitch-1e-3 grid over the box and returns the
// number of feasible points that beat the candidate.
std::size_t grid_beaters(const KnapsackProblem& p, const std::vector<double>& candidate) {
  const double pitch = 1e-3;
  const std::size_t n = p.variables.size();
  std::vector<long> lo(n), hi(n), k(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = static_cast<long>(std::ceil(p.variables[i].lower / pitch - 1e-9));
    hi[i] = static_cast<long>(std::floor(p.variables[i].upper / pitch + 1e-9));
    k[i] = lo[i];
  }
  std::size_t beaters = 0;
  std::vector<double> x(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(k[i]) * pitch;
    if (oracle_feasible(p, x) && lex_compare(x, candidate, 1e-9) > 0) ++beaters;
    std::size_t i = 0;
    while (i < n && ++k[i] > hi[i]) k[i] = lo[i], ++i;
    if (i == n) break;
  }
  return beaters;
}

}  // namespace

TEST(PriorityOrder, Examples) {
  const auto p = box({{"v1", 0, 0.9442}, {"v2", 0, 1.0}});
  const auto o = priority_order(p);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0].lower_id, "v1");
  EXPECT_EQ(o[0].upper_id, "v2");
  EXPECT_FALSE(o[0].tied);

  for (const auto& pair : priority_order(box({{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}}))) EXPECT_TRUE(pair.tied);
  EXPECT_TRUE(priority_order(box({{"a", 0, 1}})).empty());
}

TEST(Maxmin, MonogamySolutionThree) {
  const auto r = lexicographic_maxmin(monogamy_problem(2.5));
  ASSERT_FALSE(r.tied());
  EXPECT_NEAR(r.best().value("N_AB"), 0.5, 1e-12);
  EXPECT_NEAR(r.best().value("N_5"), 0.5, 1e-12);
  const auto r2 = lexicographic_maxmin(monogamy_problem(2.8));
  EXPECT_NEAR(r2.best().value("N_AB"), 0.4, 1e-12);
  EXPECT_NEAR(r2.best().value("N_5"), 0.4, 1e-12);
}

TEST(Maxmin, MonogamyZeroBudget) {
  // lambda = 4 itself is rejected by the builder, so zero the budget directly.
  KnapsackProblem p = monogamy_problem(2.0);
  p.constraints[0].budget = 0.0;
  const auto z = lexicographic_maxmin(p);
  EXPECT_EQ(values_of(z.best()), (std::vector<double>{0.0, 0.0}));
}

TEST(Maxmin, MonogamyOutsideSolutionThreeRegime) {
  const auto r = lexicographic_maxmin(monogamy_problem(0.5));
  EXPECT_NEAR(r.best().value("N_AB"), 1.0, 1e-12);
  EXPECT_NEAR(r.best().value("N_5"), 0.9442, 1e-12);
  // Stage 1 is capped by the smaller bound.
  EXPECT_NEAR(r.best().stage_values.front(), 0.9442, 1e-12);
}

TEST(Maxmin, BoxMaximumWithoutCoupling) {
  const auto r = lexicographic_maxmin(box({{"a", 0, 1}, {"b", 0, 2}}));
  EXPECT_EQ(values_of(r.best()), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(r.best().elimination_order, (std::vector<std::string>{"a", "b"}));
}

TEST(Maxmin, ExclusivitySelection) {
  const auto one = lexicographic_maxmin(exclusivity_problem(1.0, 0.9442));
  ASSERT_FALSE(one.tied());
  EXPECT_DOUBLE_EQ(one.best().value("N_n"), 1.0);
  EXPECT_DOUBLE_EQ(one.best().value("N_m"), 0.0);

  const auto two = lexicographic_maxmin(exclusivity_problem(0.9442, 1.0));
  ASSERT_FALSE(two.tied());
  EXPECT_DOUBLE_EQ(two.best().value("N_n"), 0.0);
  EXPECT_DOUBLE_EQ(two.best().value("N_m"), 1.0);

  const auto tie = lexicographic_maxmin(exclusivity_problem(0.7, 0.7));
  ASSERT_TRUE(tie.tied());
  ASSERT_EQ(tie.solutions.size(), 2u);
  std::set<std::vector<double>> seen;
  for (const auto& s : tie.solutions) seen.insert(values_of(s));
  EXPECT_TRUE(seen.count({0.7, 0.0}));
  EXPECT_TRUE(seen.count({0.0, 0.7}));
}

TEST(Maxmin, InfeasibleLowerBoundsNameTheConstraint) {
  const auto p = box({{"x", 0.6, 1}, {"y", 0.6, 1}}, {{{{"x", 1.0}, {"y", 1.0}}, 1.0, "cap"}});
  try {
    lexicographic_maxmin(p);
    FAIL() << "expected infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
    EXPECT_NE(std::string(e.what()).find("cap"), std::string::npos);
  }
}

TEST(Maxmin, RejectsMalformed) {
  EXPECT_THROW(lexicographic_maxmin(box({{"x", 1, 0}})), Error);
  EXPECT_THROW(lexicographic_maxmin(box({{"x", 0, 1}, {"x", 0, 1}})), Error);
  EXPECT_THROW(monogamy_problem(4.0), Error);
  EXPECT_THROW(monogamy_problem(-0.1), Error);
  EXPECT_THROW(exclusivity_problem(-1.0, 0.5), Error);
}

TEST(Property, SolutionThreeIdentity) {
  // mu = 4 - lambda <= 2 nu2 and mu/3 <= nu2, i.e. lambda >= 4 - 2 nu2.
  const double lo = 4.0 - 2.0 * kDefaultNu2;
  for (int k = 0; k <= 200; ++k) {
    const double lambda = lo + (4.0 - 1e-9 - lo) * k / 200.0;
    const double mu3 = (4.0 - lambda) / 3.0;
    const auto r = lexicographic_maxmin(monogamy_problem(lambda));
    EXPECT_NEAR(r.best().value("N_AB"), mu3, 1e-12) << "lambda=" << lambda;
    EXPECT_NEAR(r.best().value("N_5"), mu3, 1e-12) << "lambda=" << lambda;
  }
}

TEST(Property, SolutionsAreFeasible) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    KnapsackProblem p;
    const int n = 2 + trial % 3;
    for (int i = 0; i < n; ++i) {
      const double a = 0.2 * u(rng);
      p.variables.push_back({"v" + std::to_string(i), a, a + u(rng)});
    }
    // Smallest point compatible with the bounds and the priority order.
    std::vector<double> least(n);
    for (int i = 0; i < n; ++i) {
      least[i] = p.variables[i].lower;
      for (int j = 0; j < n; ++j) {
        if (p.variables[j].upper < p.variables[i].upper) least[i] = std::max(least[i], p.variables[j].lower);
      }
    }
    for (int c = 0; c < 2; ++c) {
      KnapsackConstraint con;
      double floor = 0.0;
      for (int i = 0; i < n; ++i) {
        const double coef = u(rng) < 0.3 ? 0.0 : 0.2 + 2.0 * u(rng);
        if (coef > 0) con.coefficients[p.variables[i].id] = coef, floor += coef * least[i];
      }
      con.budget = floor + u(rng);
      p.constraints.push_back(con);
    }
    const auto r = lexicographic_maxmin(p);
    for (const auto& s : r.solutions) {
      EXPECT_TRUE(oracle_feasible(p, values_of(s), 1e-9)) << "trial " << trial;
      EXPECT_TRUE(is_feasible_point(p, values_of(s)));
    }
  }
}

TEST(Property, LexicographicOptimalAgainstGrid) {
  const std::vector<KnapsackProblem> instances = {
      monogamy_problem(2.5),
      monogamy_problem(0.5),
      monogamy_problem(3.3),
      box({{"x", 0, 0.6}, {"y", 0, 0.9}}, {{{{"x", 1.0}, {"y", 3.0}}, 1.2, "k"}}),
      box({{"x", 0.1, 0.7}, {"y", 0, 0.5}}, {{{{"x", 2.0}, {"y", 1.0}}, 1.0, "k1"}, {{{"y", 1.0}}, 0.35, "k2"}}),
      box({{"x", 0, 0.3}, {"y", 0, 0.25}, {"z", 0, 0.2}},
          {{{{"x", 1.0}, {"y", 1.0}, {"z", 1.0}}, 0.5, "sum"}, {{{"x", 2.0}, {"y", 1.0}}, 0.45, "pair"}}),
      box({{"x", 0.05, 0.3}, {"y", 0, 0.28}, {"z", 0.02, 0.15}},
          {{{{"x", 1.0}, {"z", 3.0}}, 0.4, "xz"}, {{{"y", 1.0}, {"z", 1.0}}, 0.3, "yz"}}),
      box({{"x", 0, 0.2}, {"y", 0, 0.2}, {"z", 0, 0.3}}, {{{{"x", 1.0}, {"y", 2.0}, {"z", 1.0}}, 0.5, "sum"}}),
  };
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto r = lexicographic_maxmin(instances[k]);
    EXPECT_EQ(grid_beaters(instances[k], values_of(r.best())), 0u) << "instance " << k;
  }
}

TEST(Property, BudgetMonotone) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    KnapsackProblem p;
    const int n = 2 + trial % 2;
    for (int i = 0; i < n; ++i) p.variables.push_back({"v" + std::to_string(i), 0.0, 0.2 + u(rng)});
    KnapsackConstraint con;
    for (int i = 0; i < n; ++i) con.coefficients[p.variables[i].id] = 0.5 + u(rng);
    con.budget = 0.1 + u(rng);
    p.constraints.push_back(con);
    const auto before = lexicographic_maxmin(p).best().stage_values;
    p.constraints[0].budget += 0.05 + 0.5 * u(rng);
    const auto after = lexicographic_maxmin(p).best().stage_values;
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t s = 0; s < before.size(); ++s) EXPECT_GE(after[s], before[s] - 1e-9) << "trial " << trial;
  }
}
