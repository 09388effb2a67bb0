#include "qalloc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace qalloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::InvalidEdge: return "invalid-edge";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::InvalidPriors: return "invalid-priors";
    case ErrorCode::InvalidBound: return "invalid-bound";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::InvalidObservable: return "invalid-observable";
    case ErrorCode::Indeterminate: return "indeterminate";
    case ErrorCode::CapExceeded: return "cap-exceeded";
    case ErrorCode::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::Shape, std::string(what) + " must be a non-empty square matrix");
  }
}

void require_dim_cap(std::size_t dim) {
  if (dim > kMaxDimension) {
    fail(ErrorCode::InvalidDimension,
         "dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(kMaxDimension));
  }
}

}  // namespace

Matrix identity(std::size_t dim) {
  return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron_all(std::span<const Matrix> factors) {
  Matrix out = Matrix::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

double min_eigenvalue(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

Ket::Ket(CVector amplitudes, double tol) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) fail(ErrorCode::InvalidDimension, "ket must have dim >= 1");
  if (std::abs(amplitudes_.norm() - 1.0) > tol) {
    fail(ErrorCode::Domain, "ket is not normalized");
  }
}

Matrix Ket::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

Complex inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::Shape, "inner product of kets with different dims");
  return a.amplitudes().dot(b.amplitudes());
}

DensityMatrix::DensityMatrix(Matrix entries, double tol) : entries_(std::move(entries)) {
  require_square(entries_, "density matrix");
  if (!is_hermitian(entries_, tol)) fail(ErrorCode::Domain, "density matrix is not Hermitian");
  if (std::abs(entries_.trace() - Complex(1.0)) > tol) {
    fail(ErrorCode::Domain, "density matrix trace differs from 1");
  }
  if (min_eigenvalue(entries_) < -tolerance::kStructural) {
    fail(ErrorCode::Domain, "density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const Ket& ket) { return DensityMatrix(ket.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

Povm::Povm(std::vector<Matrix> elements, double tol) : elements_(std::move(elements)) {
  if (elements_.empty()) fail(ErrorCode::Shape, "POVM needs at least one element");
  require_square(elements_.front(), "POVM element");
  dim_ = static_cast<std::size_t>(elements_.front().rows());
  Matrix sum = Matrix::Zero(elements_.front().rows(), elements_.front().cols());
  for (const auto& e : elements_) {
    require_square(e, "POVM element");
    if (static_cast<std::size_t>(e.rows()) != dim_) {
      fail(ErrorCode::Shape, "POVM elements have different dimensions");
    }
    if (!is_hermitian(e, tol)) fail(ErrorCode::Domain, "POVM element is not Hermitian");
    if (min_eigenvalue(e) < -tol) fail(ErrorCode::Domain, "POVM element is not PSD");
    sum += e;
  }
  if (max_abs(sum - identity(dim_)) > tol) {
    fail(ErrorCode::Domain, "POVM elements do not sum to identity");
  }
}

Povm Povm::from_basis(std::span<const Ket> basis) {
  std::vector<Matrix> elements;
  elements.reserve(basis.size());
  for (const auto& k : basis) elements.push_back(k.projector());
  return Povm(std::move(elements));
}

Assembly::Assembly(std::vector<Povm> povms) : povms_(std::move(povms)) {
  if (povms_.empty()) fail(ErrorCode::Shape, "assembly needs at least one setting");
  for (const auto& p : povms_) {
    if (p.dim() != povms_.front().dim()) {
      fail(ErrorCode::Shape, "assembly members have different dimensions");
    }
  }
}

ProductAssembly::ProductAssembly(std::vector<Assembly> site_assemblies)
    : sites_(std::move(site_assemblies)) {
  if (sites_.empty()) fail(ErrorCode::InvalidEdge, "product assembly needs at least one site");
  std::size_t total = 1;
  for (const auto& s : sites_) {
    if (s.settings() != sites_.front().settings()) {
      fail(ErrorCode::Shape, "site assemblies have different setting counts");
    }
    total *= s.dim();
    require_dim_cap(total);
  }
}

std::vector<std::size_t> ProductAssembly::site_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(sites_.size());
  for (const auto& s : sites_) dims.push_back(s.dim());
  return dims;
}

std::size_t ProductAssembly::dim() const {
  std::size_t total = 1;
  for (const auto& s : sites_) total *= s.dim();
  return total;
}

Assembly ProductAssembly::expand() const {
  std::vector<Povm> povms;
  for (std::size_t x = 0; x < settings(); ++x) {
    std::vector<Matrix> elements = {Matrix::Ones(1, 1)};
    for (const auto& site : sites_) {
      std::vector<Matrix> next;
      next.reserve(elements.size() * site[x].outcomes());
      for (const auto& e : elements) {
        for (const auto& f : site[x].elements()) next.push_back(kron(e, f));
      }
      elements = std::move(next);
    }
    povms.emplace_back(std::move(elements));
  }
  return Assembly(std::move(povms));
}

Observable::Observable(Matrix entries, std::vector<double> outcome_values, double tol)
    : entries_(std::move(entries)), outcome_values_(std::move(outcome_values)) {
  require_square(entries_, "observable");
  if (!is_hermitian(entries_, tol)) {
    fail(ErrorCode::InvalidObservable, "observable is not Hermitian");
  }
  if (outcome_values_.empty()) {
    fail(ErrorCode::InvalidObservable, "observable needs outcome values");
  }
  std::sort(outcome_values_.begin(), outcome_values_.end());
  outcome_values_.erase(std::unique(outcome_values_.begin(), outcome_values_.end()),
                        outcome_values_.end());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (entries_ + entries_.adjoint()),
                                           Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    const bool known = std::any_of(outcome_values_.begin(), outcome_values_.end(),
                                   [&](double v) { return std::abs(v - ev) <= tol; });
    if (!known) {
      fail(ErrorCode::InvalidObservable, "observable eigenvalue is not a listed outcome");
    }
  }
}

Observable Observable::dichotomic(Matrix entries, double tol) {
  require_square(entries, "observable");
  const auto dim = static_cast<std::size_t>(entries.rows());
  if (max_abs(entries * entries - qalloc::identity(dim)) > tol) {
    fail(ErrorCode::InvalidObservable, "+-1 observable must square to identity");
  }
  return Observable(std::move(entries), {-1.0, 1.0}, tol);
}

Observable Observable::binary(Matrix projector, double tol) {
  require_square(projector, "observable");
  if (max_abs(projector * projector - projector) > tol) {
    fail(ErrorCode::InvalidObservable, "0/1 observable must be a projector");
  }
  return Observable(std::move(projector), {0.0, 1.0}, tol);
}

Observable Observable::identity(std::size_t dim) {
  return Observable(qalloc::identity(dim), {1.0});
}

Observable Observable::negated() const {
  std::vector<double> values;
  for (double v : outcome_values_) values.push_back(-v);
  return Observable(-entries_, std::move(values));
}

// ---------------------------------------------------------------------------

std::vector<Ket> computational_basis(std::size_t d) {
  if (d < 1) fail(ErrorCode::InvalidDimension, "dimension must be positive");
  std::vector<Ket> out;
  for (std::size_t k = 0; k < d; ++k) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(k)) = 1.0;
    out.emplace_back(std::move(v));
  }
  return out;
}

std::vector<Ket> fourier_basis(std::size_t d) {
  if (d < 2) fail(ErrorCode::InvalidDimension, "Fourier basis needs d >= 2");
  require_dim_cap(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Ket> out;
  out.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    CVector v(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      // Reduce jk mod d first so the phase stays accurate for large d.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) /
                           static_cast<double>(d);
      v(static_cast<Eigen::Index>(k)) = std::polar(scale, phase);
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

Assembly mub_pair_assembly(std::size_t d) {
  if (d < 2) fail(ErrorCode::InvalidDimension, "MUB pair needs d >= 2");
  const auto z = computational_basis(d);
  const auto f = fourier_basis(d);
  return Assembly({Povm::from_basis(z), Povm::from_basis(f)});
}

ProductAssembly product_assembly(std::size_t n_sites, std::size_t d) {
  if (n_sites < 1) fail(ErrorCode::InvalidParameter, "product assembly needs N >= 1");
  if (d < 2) fail(ErrorCode::InvalidDimension, "product assembly needs d >= 2");
  std::size_t total = 1;
  for (std::size_t i = 0; i < n_sites; ++i) {
    total *= d;
    require_dim_cap(total);
  }
  const Assembly site = mub_pair_assembly(d);
  return ProductAssembly(std::vector<Assembly>(n_sites, site));
}

ProductAssembly reduce_assembly(const ProductAssembly& pa, std::span<const std::size_t> keep) {
  const std::set<std::size_t> sites(keep.begin(), keep.end());
  if (sites.empty()) fail(ErrorCode::InvalidEdge, "reduction needs a non-empty site subset");
  std::vector<Assembly> kept;
  for (std::size_t s : sites) {
    if (s >= pa.sites()) {
      fail(ErrorCode::InvalidEdge, "site index " + std::to_string(s) + " out of range");
    }
    kept.push_back(pa.site_assemblies()[s]);
  }
  return ProductAssembly(std::move(kept));
}

Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims,
                     std::span<const std::size_t> keep) {
  require_square(m, "partial_trace input");
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) fail(ErrorCode::Shape, "subsystem dimension must be positive");
    total *= d;
  }
  if (total != static_cast<std::size_t>(m.rows())) {
    fail(ErrorCode::Shape, "product of subsystem dims does not match matrix size");
  }
  const std::set<std::size_t> kept(keep.begin(), keep.end());
  if (kept.empty()) fail(ErrorCode::InvalidEdge, "partial_trace needs a non-empty keep set");
  if (*kept.rbegin() >= dims.size()) fail(ErrorCode::Shape, "keep index out of range");

  const std::size_t n = dims.size();
  std::size_t kept_dim = 1;
  for (std::size_t s : kept) kept_dim *= dims[s];

  // Row-major mixed radix: subsystem 0 is most significant.
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * dims[i];

  auto split = [&](std::size_t index, std::size_t& kept_index, std::size_t& traced_index) {
    kept_index = 0;
    traced_index = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t digit = (index / stride[i]) % dims[i];
      if (kept.count(i)) {
        kept_index = kept_index * dims[i] + digit;
      } else {
        traced_index = traced_index * dims[i] + digit;
      }
    }
  };

  std::vector<std::size_t> kept_of(total), traced_of(total);
  for (std::size_t i = 0; i < total; ++i) split(i, kept_of[i], traced_of[i]);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kept_dim),
                            static_cast<Eigen::Index>(kept_dim));
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      if (traced_of[i] != traced_of[j]) continue;
      out(static_cast<Eigen::Index>(kept_of[i]), static_cast<Eigen::Index>(kept_of[j])) +=
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  return DensityMatrix(partial_trace(rho.entries(), dims, keep));
}

bool is_unbiased_pair(std::span<const Ket> basis_a, std::span<const Ket> basis_b,
                      std::size_t D, double tol) {
  if (basis_a.size() != D || basis_b.size() != D) return false;
  auto same_basis_ok = [&](std::span<const Ket> basis) {
    for (std::size_t a = 0; a < D; ++a) {
      for (std::size_t b = 0; b < D; ++b) {
        if (basis[a].dim() != D) return false;
        const double overlap = std::norm(inner(basis[a], basis[b]));
        if (std::abs(overlap - (a == b ? 1.0 : 0.0)) > tol) return false;
      }
    }
    return true;
  };
  if (!same_basis_ok(basis_a) || !same_basis_ok(basis_b)) return false;
  const double target = 1.0 / static_cast<double>(D);
  for (const auto& u : basis_a) {
    for (const auto& v : basis_b) {
      if (std::abs(std::norm(inner(u, v)) - target) > tol) return false;
    }
  }
  return true;
}

std::vector<Ket> basis_of(const Povm& povm, double tol) {
  std::vector<Ket> out;
  out.reserve(povm.outcomes());
  for (const auto& e : povm.elements()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (e + e.adjoint()));
    const Eigen::Index top = es.eigenvalues().size() - 1;
    const CVector v = es.eigenvectors().col(top);
    if (max_abs(e - v * v.adjoint()) > tol) {
      fail(ErrorCode::Domain, "POVM element is not a rank-1 projector");
    }
    out.emplace_back(v.normalized());
  }
  return out;
}

double expectation(const DensityMatrix& rho, const Matrix& op) {
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != rho.dim()) {
    fail(ErrorCode::Shape, "operator and state dimensions differ");
  }
  return (rho.entries() * op).trace().real();
}

double expectation(const DensityMatrix& rho, const Observable& obs) {
  return expectation(rho, obs.entries());
}

}  // namespace qalloc
