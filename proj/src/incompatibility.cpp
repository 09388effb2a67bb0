#include "qalloc/incompatibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qalloc {

namespace {

using RealMatrix = Eigen::MatrixXd;

std::vector<std::vector<std::size_t>> outcome_tuples(const Assembly& assembly) {
  std::vector<std::vector<std::size_t>> tuples = {{}};
  for (const auto& povm : assembly.povms()) {
    std::vector<std::vector<std::size_t>> next;
    next.reserve(tuples.size() * povm.outcomes());
    for (const auto& t : tuples) {
      for (std::size_t a = 0; a < povm.outcomes(); ++a) {
        auto u = t;
        u.push_back(a);
        next.push_back(std::move(u));
      }
    }
    tuples = std::move(next);
  }
  return tuples;
}

void check_size_caps(const Assembly& assembly) {
  std::size_t parents = 1;
  for (const auto& povm : assembly.povms()) {
    parents *= povm.outcomes();
    if (parents > kMaxParentOutcomes) {
      fail(ErrorCode::CapExceeded,
           "assembly needs more than " + std::to_string(kMaxParentOutcomes) + " parent outcomes");
    }
  }
  if (assembly.dim() > kMaxRobustnessDim) {
    fail(ErrorCode::CapExceeded,
         "assembly dimension exceeds " + std::to_string(kMaxRobustnessDim));
  }
  if (assembly.settings() > kMaxRobustnessSettings) {
    fail(ErrorCode::CapExceeded,
         "assembly has more than " + std::to_string(kMaxRobustnessSettings) + " settings");
  }
}

Matrix project_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

// Block-structured affine feasibility problem: unknown Hermitian blocks Z_c,
// constraints sum_c C(r, c) Z_c = B_r. Every block lives in the PSD cone. The
// constraint matrix acts identically on each matrix entry, so the affine
// projection needs only the pseudo-inverse of the small real matrix C.
struct BlockProblem {
  RealMatrix coupling;
  RealMatrix coupling_pinv;
  std::vector<Matrix> rhs;
  std::size_t dim = 0;
  std::size_t parent_blocks = 0;
};

BlockProblem build_problem(const Assembly& assembly,
                           const std::vector<std::vector<std::size_t>>& tuples,
                           std::optional<double> s) {
  const std::size_t d = assembly.dim();
  std::size_t marginals = 0;
  for (const auto& povm : assembly.povms()) marginals += povm.outcomes();

  const std::size_t n_parent = tuples.size();
  const std::size_t n_blocks = n_parent + (s ? marginals : 0);
  BlockProblem problem;
  problem.dim = d;
  problem.parent_blocks = n_parent;
  problem.coupling = RealMatrix::Zero(static_cast<Eigen::Index>(marginals + 1),
                                      static_cast<Eigen::Index>(n_blocks));
  std::size_t row = 0;
  for (std::size_t x = 0; x < assembly.settings(); ++x) {
    for (std::size_t a = 0; a < assembly[x].outcomes(); ++a, ++row) {
      for (std::size_t l = 0; l < n_parent; ++l) {
        if (tuples[l][x] == a) problem.coupling(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(l)) = 1.0;
      }
      if (s) {
        problem.coupling(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(n_parent + row)) = -1.0;
      }
      problem.rhs.push_back(assembly[x][a]);
    }
  }
  for (std::size_t l = 0; l < n_parent; ++l) {
    problem.coupling(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(l)) = 1.0;
  }
  problem.rhs.push_back((1.0 + s.value_or(0.0)) * identity(d));

  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(problem.coupling);
  problem.coupling_pinv = cod.pseudoInverse();
  return problem;
}

std::vector<Matrix> apply_coupling(const RealMatrix& c, const std::vector<Matrix>& blocks,
                                   std::size_t dim) {
  std::vector<Matrix> out(static_cast<std::size_t>(c.rows()),
                          Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
      const double w = c(r, k);
      if (w != 0.0) out[static_cast<std::size_t>(r)] += w * blocks[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

FeasibilityResult run_alternating_projections(const Assembly& assembly, std::optional<double> s,
                                              const FeasibilityOptions& options) {
  check_size_caps(assembly);
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidParameter, "feasibility tol must be positive");

  const auto tuples = outcome_tuples(assembly);
  const BlockProblem problem = build_problem(assembly, tuples, s);
  const std::size_t d = problem.dim;
  const auto n_blocks = static_cast<std::size_t>(problem.coupling.cols());

  // Stall detection: compare the residual against the value one window ago.
  constexpr std::size_t kWindow = 200;
  constexpr double kStallRatio = 1e-6;

  std::vector<Matrix> z(n_blocks, Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  std::vector<Matrix> k(n_blocks);
  double residual = 0.0;
  double window_start = std::numeric_limits<double>::infinity();
  FeasibilityResult result;

  auto make_certificate = [&](const std::vector<Matrix>& blocks) {
    ParentCandidate c;
    c.outcome_tuples = tuples;
    c.parent_elements.assign(blocks.begin(),
                             blocks.begin() + static_cast<std::ptrdiff_t>(problem.parent_blocks));
    c.residual = parent_residual(assembly, c, s);
    return c;
  };

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    for (std::size_t b = 0; b < n_blocks; ++b) k[b] = project_psd(z[b]);
    auto r = apply_coupling(problem.coupling, k, d);
    residual = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] -= problem.rhs[i];
      residual = std::max(residual, max_abs(r[i]));
    }
    if (residual <= options.tol) {
      ParentCandidate cert = make_certificate(k);
      if (cert.residual <= options.tol) {
        result.feasible = true;
        result.certificate = std::move(cert);
        result.iterations = it + 1;
        return result;
      }
    }
    const auto correction = apply_coupling(problem.coupling_pinv, r, d);
    for (std::size_t b = 0; b < n_blocks; ++b) z[b] = k[b] - correction[b];

    if ((it + 1) % kWindow == 0) {
      if (window_start - residual <= kStallRatio * window_start) break;
      window_start = residual;
    }
  }

  result.iterations = std::min(it + 1, options.max_iterations);
  if (residual < 10.0 * options.tol) {
    fail(ErrorCode::Indeterminate,
         "alternating projections stopped with residual " + std::to_string(residual) +
             " between tol and 10 tol; tighten the tolerance or raise the iteration cap");
  }
  result.feasible = false;
  result.certificate = make_certificate(k);
  return result;
}

}  // namespace

double parent_residual(const Assembly& assembly, const ParentCandidate& candidate,
                       std::optional<double> s) {
  const std::size_t d = assembly.dim();
  if (candidate.parent_elements.size() != candidate.outcome_tuples.size()) {
    fail(ErrorCode::Shape, "parent candidate has mismatched tuples and elements");
  }
  double worst = 0.0;
  Matrix total = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& g : candidate.parent_elements) {
    if (static_cast<std::size_t>(g.rows()) != d) fail(ErrorCode::Shape, "parent element has wrong dim");
    worst = std::max(worst, -min_eigenvalue(g));
    worst = std::max(worst, max_abs(g - g.adjoint()));
    total += g;
  }
  worst = std::max(worst, max_abs(total - (1.0 + s.value_or(0.0)) * identity(d)));
  for (std::size_t x = 0; x < assembly.settings(); ++x) {
    for (std::size_t a = 0; a < assembly[x].outcomes(); ++a) {
      Matrix marginal = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t l = 0; l < candidate.outcome_tuples.size(); ++l) {
        if (candidate.outcome_tuples[l].at(x) == a) marginal += candidate.parent_elements[l];
      }
      const Matrix diff = marginal - assembly[x][a];
      worst = std::max(worst, s ? -min_eigenvalue(diff) : max_abs(diff));
    }
  }
  return worst;
}

FeasibilityResult joint_measurability_feasible(const Assembly& assembly,
                                               const FeasibilityOptions& options) {
  return run_alternating_projections(assembly, std::nullopt, options);
}

FeasibilityResult robustness_feasible(const Assembly& assembly, double s,
                                      const FeasibilityOptions& options) {
  if (!(s >= 0.0)) fail(ErrorCode::InvalidParameter, "robustness level s must be >= 0");
  return run_alternating_projections(assembly, s, options);
}

RobustnessResult generalized_robustness(const Assembly& assembly, const RobustnessOptions& options) {
  if (!(options.bracket_tol > 0.0) || !(options.s_max > 0.0)) {
    fail(ErrorCode::InvalidParameter, "bracket tol and s_max must be positive");
  }
  RobustnessResult result;

  // Indeterminate probes count as infeasible: hi only ever moves to levels
  // that come with a certificate.
  auto probe = [&](double s) -> std::optional<FeasibilityResult> {
    ++result.probes;
    try {
      auto r = robustness_feasible(assembly, s, options.feasibility);
      if (r.feasible) return r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Indeterminate) throw;
    }
    return std::nullopt;
  };

  if (auto at_zero = probe(0.0)) {
    result.certificate = std::move(at_zero->certificate);
    return result;
  }
  auto at_max = probe(options.s_max);
  if (!at_max) {
    fail(ErrorCode::CapExceeded,
         "assembly is not robust-feasible at s_max = " + std::to_string(options.s_max));
  }
  double lo = 0.0;
  double hi = options.s_max;
  result.certificate = std::move(at_max->certificate);
  while (hi - lo > options.bracket_tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto r = probe(mid)) {
      hi = mid;
      result.certificate = std::move(r->certificate);
    } else {
      lo = mid;
    }
  }
  result.lo = lo;
  result.hi = hi;
  result.value = hi;
  return result;
}

double closed_form_mub_robustness(double D) {
  if (D < 1.0) fail(ErrorCode::InvalidDimension, "dimension must be >= 1");
  const double root = std::sqrt(D);
  return (root - 1.0) / (root + 1.0);
}

Assembly depolarize(const Assembly& assembly, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorCode::InvalidParameter, "eta must lie in [0, 1]");
  const std::size_t d = assembly.dim();
  const Matrix noise = identity(d) / static_cast<double>(d);
  std::vector<Povm> povms;
  for (const auto& povm : assembly.povms()) {
    std::vector<Matrix> elements;
    for (const auto& e : povm.elements()) {
      elements.push_back(eta * e + (1.0 - eta) * noise * e.trace().real());
    }
    povms.emplace_back(std::move(elements));
  }
  return Assembly(std::move(povms));
}

Assembly mix_with_trivial(const Assembly& assembly, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) fail(ErrorCode::InvalidParameter, "weight must lie in [0, 1]");
  const std::size_t d = assembly.dim();
  std::vector<Povm> povms;
  for (const auto& povm : assembly.povms()) {
    const Matrix trivial = identity(d) / static_cast<double>(povm.outcomes());
    std::vector<Matrix> elements;
    for (const auto& e : povm.elements()) elements.push_back(weight * e + (1.0 - weight) * trivial);
    povms.emplace_back(std::move(elements));
  }
  return Assembly(std::move(povms));
}

}  // namespace qalloc
