#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qalloc/qcore.hpp"

namespace qalloc {

/// Parent POVM candidate. Element i belongs to outcome tuple outcome_tuples[i]
/// (one outcome per setting); the response functions are deterministic.
struct ParentCandidate {
  std::vector<std::vector<std::size_t>> outcome_tuples;
  std::vector<Matrix> parent_elements;
  /// Max constraint violation measured in the sup norm (see parent_residual).
  double residual = 0.0;
};

struct FeasibilityOptions {
  double tol = 1e-8;
  std::size_t max_iterations = 50'000;
};

struct FeasibilityResult {
  bool feasible = false;
  ParentCandidate certificate;
  std::size_t iterations = 0;
};

struct RobustnessOptions {
  double bracket_tol = 1e-6;
  FeasibilityOptions feasibility{};
  double s_max = 4.0;
};

struct RobustnessResult {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  ParentCandidate certificate;
  /// Number of feasibility probes run by the bisection.
  std::size_t probes = 0;
};

/// Upper bound on the number of parent outcomes prod_x (outcomes of x).
inline constexpr std::size_t kMaxParentOutcomes = 64;
inline constexpr std::size_t kMaxRobustnessDim = 8;
inline constexpr std::size_t kMaxRobustnessSettings = 3;

/// Decides joint measurability by alternating projections between the PSD
/// cone of parent elements and the affine set of marginal constraints.
/// Throws Indeterminate when the iteration cap is hit with residual in
/// (tol, 10 tol); residual >= 10 tol is reported as infeasible.
FeasibilityResult joint_measurability_feasible(const Assembly& assembly,
                                               const FeasibilityOptions& options = {});

/// Relaxed problem behind the robustness: G_l >= 0, sum_l G_l = (1+s) I and
/// each marginal dominates M_{a|x}. Same outcome semantics as above.
FeasibilityResult robustness_feasible(const Assembly& assembly, double s,
                                      const FeasibilityOptions& options = {});

/// Generalized robustness by bisection over s in [0, s_max].
RobustnessResult generalized_robustness(const Assembly& assembly,
                                        const RobustnessOptions& options = {});

/// (sqrt(D) - 1) / (sqrt(D) + 1); 0 for D = 1.
double closed_form_mub_robustness(double D);

/// Violation of the parent constraints recomputed from scratch. Without s
/// the marginals must match M exactly (joint measurability); with s they must
/// dominate M and the elements must sum to (1+s) I.
double parent_residual(const Assembly& assembly, const ParentCandidate& candidate,
                       std::optional<double> s = std::nullopt);

/// eta M_{a|x} + (1 - eta) Tr(M_{a|x}) I/d.
Assembly depolarize(const Assembly& assembly, double eta);
/// weight M_{a|x} + (1 - weight) I/outcomes(x).
Assembly mix_with_trivial(const Assembly& assembly, double weight);

}  // namespace qalloc
