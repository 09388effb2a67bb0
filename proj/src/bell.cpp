#include "qalloc/bell.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace qalloc {

namespace {

constexpr double kActivityThreshold = 1e-9;

void require_dichotomic(const Observable& o, const char* name) {
  const auto& v = o.outcome_values();
  for (double x : v) {
    if (x != 1.0 && x != -1.0) {
      fail(ErrorCode::InvalidObservable, std::string(name) + " must have outcomes +-1");
    }
  }
  if (max_abs(o.entries() * o.entries() - identity(o.dim())) > tolerance::kStructural) {
    fail(ErrorCode::InvalidObservable, std::string(name) + " must square to identity");
  }
}

Matrix symmetrized(const Matrix& a, const Matrix& b) { return 0.5 * (a * b + b * a); }

void require_projector(const Matrix& p, const char* name) {
  if (p.rows() != p.cols() || p.rows() == 0) {
    fail(ErrorCode::InvalidObservable, std::string(name) + " must be square");
  }
  if (!is_hermitian(p, tolerance::kStructural) ||
      max_abs(p * p - p) > tolerance::kStructural) {
    fail(ErrorCode::InvalidObservable, std::string(name) + " is not a projector");
  }
}

void require_involution(const Matrix& o, const char* name) {
  if (o.rows() != o.cols() || o.rows() == 0) {
    fail(ErrorCode::InvalidObservable, std::string(name) + " must be square");
  }
  if (!is_hermitian(o, tolerance::kStructural) ||
      max_abs(o * o - identity(static_cast<std::size_t>(o.rows()))) > tolerance::kStructural) {
    fail(ErrorCode::InvalidObservable, std::string(name) + " must be Hermitian and square to identity");
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, const Matrix& c, const char* side) {
  if (a.rows() != b.rows() || a.rows() != c.rows()) {
    fail(ErrorCode::Shape, std::string(side) + " operators have different dimensions");
  }
}

Matrix haar_projector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(2);
  for (Eigen::Index i = 0; i < 2; ++i) v(i) = Complex(normal(rng), normal(rng));
  v.normalize();
  return v * v.adjoint();
}

}  // namespace

void CyclicScenario::validate() const {
  if (observables.size() < 3) fail(ErrorCode::InvalidParameter, "cyclic scenario needs s >= 3");
  for (const auto& o : observables) {
    if (o.dim() != state.dim()) fail(ErrorCode::Shape, "observable and state dimensions differ");
    require_dichotomic(o, "cyclic observable");
  }
}

void I3322Scenario::validate() const {
  const std::size_t da = a1.dim();
  const std::size_t db = b1.dim();
  if (a2.dim() != da || a3.dim() != da || b4.dim() != db || b6.dim() != db) {
    fail(ErrorCode::Shape, "I3322 observables on one side have different dimensions");
  }
  if (da * db != state.dim()) fail(ErrorCode::Shape, "state dimension differs from dA * dB");
  for (const Observable* o : {&a1, &a2, &a3, &b1, &b4, &b6}) require_dichotomic(*o, "I3322 observable");
}

double cyclic_correlation(const CyclicScenario& scenario) {
  scenario.validate();
  const auto& obs = scenario.observables;
  const std::size_t s = obs.size();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < s; ++k) {
    total += expectation(scenario.state, symmetrized(obs[k].entries(), obs[k + 1].entries()));
  }
  total -= expectation(scenario.state, symmetrized(obs[s - 1].entries(), obs[0].entries()));
  return total;
}

double adjacent_commutator_norm(const CyclicScenario& scenario) {
  const auto& obs = scenario.observables;
  double worst = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const Matrix& a = obs[k].entries();
    const Matrix& b = obs[(k + 1) % obs.size()].entries();
    worst = std::max(worst, max_abs(a * b - b * a));
  }
  return worst;
}

double i3322_correlation(const I3322Scenario& sc) {
  sc.validate();
  const std::size_t da = sc.a1.dim();
  const std::size_t db = sc.b1.dim();
  const Matrix ia = identity(da);
  const Matrix ib = identity(db);
  auto local_a = [&](const Observable& a) { return expectation(sc.state, kron(a.entries(), ib)); };
  auto local_b = [&](const Observable& b) { return expectation(sc.state, kron(ia, b.entries())); };
  auto joint = [&](const Observable& b, const Observable& a) {
    return expectation(sc.state, kron(a.entries(), b.entries()));
  };
  return local_b(sc.b1) + local_b(sc.b4) + local_a(sc.a1) + local_a(sc.a2)  //
         - joint(sc.b1, sc.a1) - joint(sc.b1, sc.a2) - joint(sc.b1, sc.a3)  //
         - joint(sc.b4, sc.a1) - joint(sc.b4, sc.a2) + joint(sc.b4, sc.a3)  //
         - joint(sc.b6, sc.a1) + joint(sc.b6, sc.a2);
}

double monotone_value(double correlation_value, double classical_bound) {
  return std::max(0.0, correlation_value - classical_bound);
}

int activity_indicator(double correlation_value, double classical_bound) {
  return correlation_value - classical_bound > kActivityThreshold ? 1 : 0;
}

Matrix build_vertesi_operator(const Matrix& a1, const Matrix& a2, const Matrix& a3,
                              const Matrix& b1, const Matrix& b4, const Matrix& b6) {
  require_projector(a1, "A1");
  require_projector(a2, "A2");
  require_projector(a3, "A3");
  require_projector(b1, "B1");
  require_projector(b4, "B4");
  require_projector(b6, "B6");
  require_same_dim(a1, a2, a3, "A");
  require_same_dim(b1, b4, b6, "B");
  const Matrix ia = identity(static_cast<std::size_t>(a1.rows()));
  const Matrix ib = identity(static_cast<std::size_t>(b1.rows()));
  return -kron(a2, ib) - kron(ia, b1) - 2.0 * kron(ia, b4) + kron(a1, b1)  //
         + kron(a1, b4) + kron(a2, b1) + kron(a2, b4) - kron(a1, b6)        //
         + kron(a2, b6) - kron(a3, b1) + kron(a3, b4);
}

Matrix build_gamma_operator(const Matrix& a1, const Matrix& a2, const Matrix& a3,
                            const Matrix& b1, const Matrix& b4, const Matrix& b6) {
  require_involution(a1, "A'1");
  require_involution(a2, "A'2");
  require_involution(a3, "A'3");
  require_involution(b1, "B'1");
  require_involution(b4, "B'4");
  require_involution(b6, "B'6");
  require_same_dim(a1, a2, a3, "A");
  require_same_dim(b1, b4, b6, "B");
  const Matrix ia = identity(static_cast<std::size_t>(a1.rows()));
  const Matrix ib = identity(static_cast<std::size_t>(b1.rows()));
  const Matrix b1r = -b1;
  const Matrix b4r = -b4;
  const Matrix a3r = -a3;
  return kron(a1, ib) + kron(a2, ib) + kron(ia, b1r) + kron(ia, b4r)  //
         - kron(a1, b1r) - kron(a1, b4r) - kron(a2, b1r) - kron(a2, b4r)  //
         - kron(a1, b6) + kron(a2, b6) - kron(a3r, b1r) + kron(a3r, b4r);
}

I3322Scenario gamma_scenario(const DensityMatrix& state, const Matrix& a1, const Matrix& a2,
                             const Matrix& a3, const Matrix& b1, const Matrix& b4,
                             const Matrix& b6) {
  I3322Scenario sc{state,
                   Observable::dichotomic(a1),
                   Observable::dichotomic(a2),
                   Observable::dichotomic(-a3),
                   Observable::dichotomic(-b1),
                   Observable::dichotomic(-b4),
                   Observable::dichotomic(b6)};
  sc.validate();
  return sc;
}

double operator_identity_residual(const Matrix& a1, const Matrix& a2, const Matrix& a3,
                                  const Matrix& b1, const Matrix& b4, const Matrix& b6) {
  const Matrix bv = build_vertesi_operator(a1, a2, a3, b1, b4, b6);
  auto pm = [](const Matrix& p) {
    return Matrix(2.0 * p - identity(static_cast<std::size_t>(p.rows())));
  };
  const Matrix bg = build_gamma_operator(pm(a1), pm(a2), pm(a3), pm(b1), pm(b4), pm(b6));
  return max_abs(bg - 4.0 * bv - 4.0 * identity(static_cast<std::size_t>(bv.rows())));
}

IdentityReport verify_operator_identity(std::uint64_t seed, std::size_t trials) {
  if (trials < 1) fail(ErrorCode::InvalidParameter, "need at least one trial");
  IdentityReport report;
  report.residuals.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<Matrix> p;
    for (int slot = 0; slot < 6; ++slot) p.push_back(haar_projector(rng));
    const double r = operator_identity_residual(p[0], p[1], p[2], p[3], p[4], p[5]);
    report.residuals.push_back(r);
    report.max_residual = std::max(report.max_residual, r);
    report.mean_residual += r / static_cast<double>(trials);
  }
  return report;
}

DensityMatrix apply_mixing(const DensityMatrix& rho, const MixingOperation& op) {
  if (!(op.weight >= 0.0 && op.weight <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "mixing weight must lie in [0, 1]");
  }
  if (op.state.dim() != rho.dim()) fail(ErrorCode::Shape, "mixing state dimension differs");
  return DensityMatrix(op.weight * rho.entries() + (1.0 - op.weight) * op.state.entries());
}

}  // namespace qalloc
