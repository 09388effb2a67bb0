#pragma once

#include <cstdint>
#include <vector>

#include "qalloc/qcore.hpp"

namespace qalloc {

/// Quantum bounds and classical bounds used by the equitability instances.
/// Quantum values are taken as given; nothing here recomputes them.
struct BoundConstants {
  static constexpr double kNu2 = 0.9442;
  static constexpr double kNu1Low = 1.0;
  static constexpr double kNu1High = 1.0034;
  static constexpr double kVertesiLow = 0.25;
  static constexpr double kVertesiHigh = 0.25085;
  static constexpr double kI3322Classical = 4.0;

  static constexpr double cyclic_classical(int s) { return static_cast<double>(s - 2); }
};

struct CyclicScenario {
  std::vector<Observable> observables;
  DensityMatrix state;

  void validate() const;
};

/// Observables for the I3322 expression, already relabelled so that the
/// expression reads with plain signs: A1, A2, A3 on the first factor and
/// B1, B4, B6 on the second.
struct I3322Scenario {
  DensityMatrix state;
  Observable a1, a2, a3;
  Observable b1, b4, b6;

  void validate() const;
};

struct MixingOperation {
  double weight = 1.0;
  DensityMatrix state;
};

/// sum_{k<s} <B_k B_{k+1}> - <B_s B_1>, with non-commuting neighbours
/// evaluated through the symmetrized product.
double cyclic_correlation(const CyclicScenario& scenario);
/// Largest sup-norm commutator between cyclic neighbours.
double adjacent_commutator_norm(const CyclicScenario& scenario);

double i3322_correlation(const I3322Scenario& scenario);

/// Fixed-measurement lower bound of the resource monotone: max(0, I - B_c).
double monotone_value(double correlation_value, double classical_bound);

/// Activity indicator of the resource relation, 1 when the violation exceeds 1e-9.
int activity_indicator(double correlation_value, double classical_bound);

/// Bell operator built from 0/1 projectors A1, A2, A3 (first factor) and
/// B1, B4, B6 (second factor).
Matrix build_vertesi_operator(const Matrix& a1, const Matrix& a2, const Matrix& a3,
                              const Matrix& b1, const Matrix& b4, const Matrix& b6);

/// Bell operator in +-1 form from primed observables A'_i, B'_j. The
/// relabellings B''_1 = -B'_1, B''_4 = -B'_4, A''_3 = -A'_3 are applied here.
Matrix build_gamma_operator(const Matrix& a1, const Matrix& a2, const Matrix& a3,
                            const Matrix& b1, const Matrix& b4, const Matrix& b6);

/// The scenario whose I3322 value equals <gamma operator> for the same primed inputs.
I3322Scenario gamma_scenario(const DensityMatrix& state, const Matrix& a1, const Matrix& a2,
                             const Matrix& a3, const Matrix& b1, const Matrix& b4,
                             const Matrix& b6);

/// ||B_gamma - 4 B_v - 4 I||_inf for projectors, with A'_i = 2 A_i - I.
double operator_identity_residual(const Matrix& a1, const Matrix& a2, const Matrix& a3,
                                  const Matrix& b1, const Matrix& b4, const Matrix& b6);

struct IdentityReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> residuals;
};

/// Random rank-1 qubit projectors per slot (Haar kets), trial t seeded from
/// (seed, t).
IdentityReport verify_operator_identity(std::uint64_t seed, std::size_t trials);

DensityMatrix apply_mixing(const DensityMatrix& rho, const MixingOperation& op);

}  // namespace qalloc
