#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qalloc/errors.hpp"

namespace qalloc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace tolerance {
inline constexpr double kNorm = 1e-12;
inline constexpr double kStructural = 1e-10;
}  // namespace tolerance

/// Largest Hilbert-space dimension any expansion may produce.
inline constexpr std::size_t kMaxDimension = 4096;

// ---------------------------------------------------------------------------
// Matrix helpers

Matrix identity(std::size_t dim);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);
bool is_hermitian(const Matrix& m, double tol);
/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Matrix& m);
/// Largest absolute entry, used as the sup norm throughout.
double max_abs(const Matrix& m);

// ---------------------------------------------------------------------------
// Quantum objects. All are immutable once constructed; constructors validate.

class Ket {
 public:
  explicit Ket(CVector amplitudes, double tol = tolerance::kNorm);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const CVector& amplitudes() const { return amplitudes_; }
  Matrix projector() const;

 private:
  CVector amplitudes_;
};

Complex inner(const Ket& a, const Ket& b);

class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries, double tol = tolerance::kNorm);
  static DensityMatrix pure(const Ket& ket);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

class Povm {
 public:
  explicit Povm(std::vector<Matrix> elements, double tol = tolerance::kStructural);
  static Povm from_basis(std::span<const Ket> basis);

  std::size_t dim() const { return dim_; }
  std::size_t outcomes() const { return elements_.size(); }
  const std::vector<Matrix>& elements() const { return elements_; }
  const Matrix& operator[](std::size_t a) const { return elements_[a]; }

 private:
  std::size_t dim_ = 0;
  std::vector<Matrix> elements_;
};

/// Indexed family of POVMs M_{a|x}: setting x, outcome a.
class Assembly {
 public:
  explicit Assembly(std::vector<Povm> povms);

  std::size_t dim() const { return povms_.front().dim(); }
  std::size_t settings() const { return povms_.size(); }
  const std::vector<Povm>& povms() const { return povms_; }
  const Povm& operator[](std::size_t x) const { return povms_[x]; }

 private:
  std::vector<Povm> povms_;
};

/// Tensor product of per-site assemblies with a common number of settings.
/// Expanded outcome index is mixed-radix over sites, first site most significant.
class ProductAssembly {
 public:
  explicit ProductAssembly(std::vector<Assembly> site_assemblies);

  std::size_t sites() const { return sites_.size(); }
  std::size_t settings() const { return sites_.front().settings(); }
  std::vector<std::size_t> site_dims() const;
  std::size_t dim() const;
  const std::vector<Assembly>& site_assemblies() const { return sites_; }

  Assembly expand() const;

 private:
  std::vector<Assembly> sites_;
};

/// Hermitian observable with its spectrum of outcome values.
class Observable {
 public:
  Observable(Matrix entries, std::vector<double> outcome_values,
             double tol = tolerance::kStructural);

  /// Observable with outcomes +-1; requires entries^2 = I.
  static Observable dichotomic(Matrix entries, double tol = tolerance::kStructural);
  /// 0/1 observable given by a projector.
  static Observable binary(Matrix projector, double tol = tolerance::kStructural);
  static Observable identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  const std::vector<double>& outcome_values() const { return outcome_values_; }
  Observable negated() const;

 private:
  Matrix entries_;
  std::vector<double> outcome_values_;
};

// ---------------------------------------------------------------------------
// Operations

std::vector<Ket> computational_basis(std::size_t d);
/// Kets with amplitudes w^{jk}/sqrt(d), w = exp(2 pi i / d).
std::vector<Ket> fourier_basis(std::size_t d);

/// Two settings: computational basis (x = 0) and Fourier basis (x = 1).
Assembly mub_pair_assembly(std::size_t d);
ProductAssembly product_assembly(std::size_t n_sites, std::size_t d);

/// Keeps the listed sites (0-based, any order, duplicates ignored).
ProductAssembly reduce_assembly(const ProductAssembly& pa, std::span<const std::size_t> keep);

/// Partial trace over the complement of keep. Works on any square matrix whose
/// size matches the product of dims.
Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims,
                     std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

bool is_unbiased_pair(std::span<const Ket> basis_a, std::span<const Ket> basis_b,
                      std::size_t D, double tol = tolerance::kStructural);
/// Extracts the rank-1 basis behind each setting of a projective assembly.
std::vector<Ket> basis_of(const Povm& povm, double tol = tolerance::kStructural);

double expectation(const DensityMatrix& rho, const Observable& obs);
/// Re Tr(rho op) for a Hermitian operator.
double expectation(const DensityMatrix& rho, const Matrix& op);

}  // namespace qalloc
