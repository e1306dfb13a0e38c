#include "bbz/banded.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bbz/errors.hpp"
#include "lapack_shim.hpp"

namespace bbz {

SymBandMatrix::SymBandMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), band_((bandwidth + 1) * n, 0.0) {}

double SymBandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  const std::size_t d = i - j;
  return d > bw_ ? 0.0 : band_[d * n_ + j];
}

void SymBandMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  const std::size_t d = i - j;
  if (d > bw_ || i >= n_) throw ConfigError("band entry outside storage");
  band_[d * n_ + j] = value;
}

void SymBandMatrix::add_diagonal(std::span<const double> values) {
  for (std::size_t i = 0; i < n_; ++i) band_[i] += values[i];
}

void SymBandMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) y[i] = band_[i] * x[i];
  for (std::size_t d = 1; d <= bw_; ++d) {
    const double* col = band_.data() + d * n_;
    for (std::size_t j = 0; j + d < n_; ++j) {
      y[j + d] += col[j] * x[j];
      y[j] += col[j] * x[j + d];
    }
  }
}

std::vector<double> SymBandMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(n_);
  apply(x, y);
  return y;
}

void SymBandMatrix::apply(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const {
  for (std::size_t i = 0; i < n_; ++i) y[i] = band_[i] * x[i];
  for (std::size_t d = 1; d <= bw_; ++d) {
    const double* col = band_.data() + d * n_;
    for (std::size_t j = 0; j + d < n_; ++j) {
      y[j + d] += col[j] * x[j];
      y[j] += col[j] * x[j + d];
    }
  }
}

std::vector<double> SymBandMatrix::to_dense() const {
  std::vector<double> a(n_ * n_, 0.0);
  for (std::size_t d = 0; d <= bw_; ++d) {
    for (std::size_t j = 0; j + d < n_; ++j) {
      const double v = band_[d * n_ + j];
      a[(j + d) * n_ + j] = v;
      a[j * n_ + j + d] = v;
    }
  }
  return a;
}

double SymBandMatrix::max_abs() const {
  double m = 0.0;
  for (double v : band_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> dense_eigenvalues(const SymBandMatrix& a) {
  const auto n = static_cast<lapack_int>(a.size());
  std::vector<double> dense = a.to_dense();
  std::vector<double> w(a.size());
  const lapack_int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'L', n, dense.data(), n, w.data());
  if (info != 0) throw ComputationError("dsyev failed with info = " + std::to_string(info));
  return w;
}

ShiftedInertia inertia(const SymBandMatrix& a, double shift) {
  const std::size_t n = a.size();
  const std::size_t bw = a.bandwidth();
  const double scale = std::max(a.max_abs(), std::abs(shift));
  const double tiny = 64.0 * std::numeric_limits<double>::epsilon() * scale;

  // l[d * n + j] = L(j + d, j) for d = 1..bw.
  std::vector<double> l((bw + 1) * n, 0.0);
  std::vector<double> d(n, 0.0);
  ShiftedInertia out;
  bool breakdown = false;
  for (std::size_t j = 0; j < n && !breakdown; ++j) {
    const std::size_t k0 = j >= bw ? j - bw : 0;
    double djj = a(j, j) - shift;
    for (std::size_t k = k0; k < j; ++k) {
      const double ljk = l[(j - k) * n + k];
      djj -= ljk * ljk * d[k];
    }
    d[j] = djj;
    if (std::abs(djj) <= tiny) {
      breakdown = true;
      break;
    }
    const std::size_t i1 = std::min(n - 1, j + bw);
    for (std::size_t i = j + 1; i <= i1; ++i) {
      double v = a(i, j);
      const std::size_t kk0 = i >= bw ? i - bw : 0;
      for (std::size_t k = kk0; k < j; ++k) v -= l[(i - k) * n + k] * l[(j - k) * n + k] * d[k];
      l[(i - j) * n + j] = v / djj;
    }
    if (djj < 0.0) {
      ++out.below;
    } else {
      ++out.above;
    }
  }
  if (!breakdown) return out;

  ShiftedInertia dense;
  dense.used_fallback = true;
  for (double w : dense_eigenvalues(a)) {
    const double r = w - shift;
    if (std::abs(r) <= tiny) {
      ++dense.at;
    } else if (r < 0.0) {
      ++dense.below;
    } else {
      ++dense.above;
    }
  }
  return dense;
}

double eigenvalue_by_index(const SymBandMatrix& a, std::size_t k, double abs_tol) {
  if (k >= a.size()) throw ConfigError("eigenvalue index out of range");
  const std::size_t n = a.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    const std::size_t j0 = i >= a.bandwidth() ? i - a.bandwidth() : 0;
    const std::size_t j1 = std::min(n - 1, i + a.bandwidth());
    for (std::size_t j = j0; j <= j1; ++j) {
      if (j != i) radius += std::abs(a(i, j));
    }
    lo = std::min(lo, a(i, i) - radius);
    hi = std::max(hi, a(i, i) + radius);
  }
  // Invariant: at most k eigenvalues below lo, more than k below hi.
  while (hi - lo > abs_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const ShiftedInertia in = inertia(a, mid);
    if (in.below > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> band_solve(const SymBandMatrix& a, std::span<const double> rhs) {
  const auto n = static_cast<lapack_int>(a.size());
  const auto k = static_cast<lapack_int>(a.bandwidth());
  const lapack_int ldab = 3 * k + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab * n), 0.0);
  for (lapack_int j = 0; j < n; ++j) {
    for (lapack_int i = std::max<lapack_int>(0, j - k); i <= std::min<lapack_int>(n - 1, j + k); ++i) {
      ab[static_cast<std::size_t>(j * ldab + 2 * k + i - j)] =
          a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  std::vector<double> x(rhs.begin(), rhs.end());
  std::vector<lapack_int> ipiv(a.size());
  const lapack_int info =
      LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, k, k, 1, ab.data(), ldab, ipiv.data(), x.data(), n);
  if (info > 0) throw ComputationError("banded solve: exactly singular pivot at row " + std::to_string(info));
  if (info < 0) throw ComputationError("banded solve: invalid argument " + std::to_string(-info));
  return x;
}

void ComplexBandLU::factor() {
  const auto n = static_cast<lapack_int>(n_);
  const auto k = static_cast<lapack_int>(k_);
  ipiv_.resize(n_);
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, k, k, ab_.data(), 3 * k + 1, ipiv_.data());
  if (info < 0) throw ComputationError("zgbtrf: invalid argument " + std::to_string(-info));
  // info > 0 leaves an exact zero pivot; solve() would divide by it.
  if (info > 0) throw ComputationError("zgbtrf: exactly singular pivot at row " + std::to_string(info));
}

std::vector<std::complex<double>> ComplexBandLU::solve(std::span<const std::complex<double>> rhs) const {
  const auto n = static_cast<lapack_int>(n_);
  const auto k = static_cast<lapack_int>(k_);
  std::vector<std::complex<double>> x(rhs.begin(), rhs.end());
  const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, k, k, 1, ab_.data(), 3 * k + 1, ipiv_.data(),
                                         x.data(), n);
  if (info != 0) throw ComputationError("zgbtrs failed with info = " + std::to_string(info));
  return x;
}

}  // namespace bbz
