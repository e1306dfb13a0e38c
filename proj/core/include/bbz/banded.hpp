#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bbz {

/// Real symmetric band matrix, lower storage: diag(d)[i] = A(i + d, i) for
/// d = 0..bandwidth.
class SymBandMatrix {
 public:
  SymBandMatrix() = default;
  SymBandMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

  /// Entry (i, j); zero outside the band. Symmetric by construction.
  double operator()(std::size_t i, std::size_t j) const;
  /// Sets (i, j) and (j, i) together; |i - j| must be within the band.
  void set(std::size_t i, std::size_t j, double value);
  void add_diagonal(std::span<const double> values);

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  void apply(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const;

  /// Row-major dense copy.
  std::vector<double> to_dense() const;

  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> band_;  // (bw_ + 1) * n_, band_[d * n_ + i] = A(i + d, i)
};

/// Sylvester inertia of A - shift * I.
struct ShiftedInertia {
  std::size_t below = 0;  // eigenvalues < shift
  std::size_t above = 0;  // eigenvalues > shift
  std::size_t at = 0;     // exact zero pivots (eigenvalue numerically equal to shift)
  bool used_fallback = false;
};

/// Counts eigenvalues on either side of `shift` from the signs of an
/// unpivoted band LDL^T factorization. Falls back to a dense symmetric
/// eigensolve when a pivot is too small for the counts to be trusted.
ShiftedInertia inertia(const SymBandMatrix& a, double shift);

/// k-th smallest eigenvalue (k = 0 is the ground state) by bisection on
/// inertia counts. Gershgorin bounds start the bracket.
double eigenvalue_by_index(const SymBandMatrix& a, std::size_t k, double abs_tol = 1e-13);

/// All eigenvalues, ascending (dense LAPACK dsyev). For tests and fallbacks.
std::vector<double> dense_eigenvalues(const SymBandMatrix& a);

/// Solves A x = b with banded LU and partial pivoting. Throws ComputationError
/// when the factorization hits an exactly singular pivot.
std::vector<double> band_solve(const SymBandMatrix& a, std::span<const double> rhs);

/// General (nonsymmetric) complex band matrix factored once and solved many
/// times; used for inverse iteration on products and block operators.
class ComplexBandLU {
 public:
  /// `entry(i, j)` must return the matrix entry for |i - j| <= bandwidth.
  template <class EntryFn>
  ComplexBandLU(std::size_t n, std::size_t bandwidth, EntryFn entry) : n_(n), k_(bandwidth) {
    const std::size_t ldab = 3 * k_ + 1;
    ab_.assign(ldab * n_, {0.0, 0.0});
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t i0 = j >= k_ ? j - k_ : 0;
      const std::size_t i1 = std::min(n_ - 1, j + k_);
      for (std::size_t i = i0; i <= i1; ++i) ab_[j * ldab + (2 * k_ + i - j)] = entry(i, j);
    }
    factor();
  }

  std::vector<std::complex<double>> solve(std::span<const std::complex<double>> rhs) const;
  std::size_t size() const { return n_; }

 private:
  void factor();
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<std::complex<double>> ab_;  // LAPACK column-major band storage, ldab = 3k + 1
  std::vector<int> ipiv_;
};

}  // namespace bbz
