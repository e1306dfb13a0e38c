#include "bbz/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <iterator>
#include <utility>

#include "bbz/errors.hpp"
#include "lapack_shim.hpp"

namespace bbz {

using cd = std::complex<double>;

std::string_view to_string(EigenClass cls) {
  switch (cls) {
    case EigenClass::Zero:
      return "zero";
    case EigenClass::Real:
      return "real";
    case EigenClass::Complex:
      return "complex";
    case EigenClass::Imaginary:
      return "imaginary";
    case EigenClass::NearEdge:
      return "near_edge";
    case EigenClass::Essential:
      return "essential";
  }
  return "?";
}

std::vector<cd> dense_nonsymmetric_eigenvalues(std::vector<double> row_major, std::size_t n) {
  const auto ln = static_cast<lapack_int>(n);
  std::vector<double> wr(n);
  std::vector<double> wi(n);
  double dummy = 0.0;
  // Column-major call on the transpose: same eigenvalues, no layout copy.
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', ln, row_major.data(), ln, wr.data(), wi.data(),
                                        &dummy, 1, &dummy, 1);
  if (info > 0) {
    throw ComputationError("dgeev: QR iteration failed to converge; eigenvalues " + std::to_string(info) + ".." +
                           std::to_string(n) + " converged, the rest did not");
  }
  if (info < 0) throw ComputationError("dgeev: invalid argument " + std::to_string(-info));
  std::vector<cd> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

namespace {

double max_abs(std::span<const cd> v) {
  double m = 0.0;
  for (const cd& x : v) m = std::max(m, std::abs(x));
  return m;
}

// Entry (i, j) of -L- L+ (band width 4).
double product_entry(const SymBandMatrix& lm, const SymBandMatrix& lp, std::size_t i, std::size_t j) {
  const std::size_t n = lm.size();
  const std::size_t lo = std::max(i, j) >= 2 ? std::max(i, j) - 2 : 0;
  const std::size_t hi = std::min(n - 1, std::min(i, j) + 2);
  double s = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) s += lm(i, k) * lp(k, j);
  return -s;
}

// Inverse iteration on a band matrix B - shift. `entry(i, j)` gives B.
template <class Entry>
std::vector<cd> inverse_iteration(std::size_t n, std::size_t bandwidth, Entry entry, cd shift) {
  // Nudge the shift off the computed eigenvalue so the factorization stays regular.
  const double scale = std::max(1.0, std::abs(shift));
  for (int attempt = 0; attempt < 4; ++attempt) {
    const cd sigma = shift + cd(1e-11, 1e-11) * scale * std::pow(100.0, attempt);
    try {
      const ComplexBandLU lu(n, bandwidth, [&](std::size_t i, std::size_t j) {
        return cd(entry(i, j)) - (i == j ? sigma : cd(0.0));
      });
      std::vector<cd> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        v[i] = cd(1.0 + 0.3 * std::sin(0.7 * t), 0.2 * std::cos(1.3 * t));
      }
      for (int it = 0; it < 3; ++it) {
        v = lu.solve(v);
        const double m = max_abs(v);
        if (!(m > 0.0) || !std::isfinite(m)) break;
        for (cd& x : v) x /= m;
      }
      return v;
    } catch (const ComputationError&) {
      continue;
    }
  }
  throw ComputationError("inverse iteration could not factor the shifted band matrix");
}

bool wants_vector(cd lambda, const VectorPolicy& policy) {
  if (std::abs(lambda) < policy.zero_floor) return false;
  return std::abs(lambda.imag()) < policy.band || std::abs(lambda.real()) > policy.re_floor;
}

}  // namespace

double eigen_residual(const DiscretizedOperator& lp, const DiscretizedOperator& lm, cd lambda,
                      std::span<const cd> z) {
  const std::size_t n = lp.n;
  std::vector<cd> a(n);
  std::vector<cd> b(n);
  lm.matrix.apply(z.subspan(n, n), a);  // L- z2
  lp.matrix.apply(z.first(n), b);       // L+ z1
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(a[i] - lambda * z[i]));
    worst = std::max(worst, std::abs(-b[i] - lambda * z[n + i]));
  }
  const double zn = max_abs(z);
  return zn > 0.0 ? worst / zn : kNaN;
}

std::vector<Eigenpair> eigen_full(const DiscretizedOperator& lp, const DiscretizedOperator& lm,
                                  const VectorPolicy& policy) {
  if (lp.n != lm.n || lp.bc != lm.bc) throw ConfigError("L+ and L- live on different grids");
  const std::size_t n = lp.n;
  const std::size_t m = 2 * n;
  std::vector<double> dense(m * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= 2 ? i - 2 : 0;
    const std::size_t j1 = std::min(n - 1, i + 2);
    for (std::size_t j = j0; j <= j1; ++j) {
      dense[i * m + n + j] = lm.matrix(i, j);
      dense[(n + i) * m + j] = -lp.matrix(i, j);
    }
  }
  const std::vector<cd> values = dense_nonsymmetric_eigenvalues(std::move(dense), m);

  // Interleaved ordering (z1_0, z2_0, z1_1, ...) turns JL into a band matrix of width 5.
  const auto entry = [&](std::size_t r, std::size_t c) -> double {
    const std::size_t i = r / 2;
    const std::size_t j = c / 2;
    if (r % 2 == 0) return c % 2 == 1 ? lm.matrix(i, j) : 0.0;
    return c % 2 == 0 ? -lp.matrix(i, j) : 0.0;
  };

  std::vector<Eigenpair> out;
  out.reserve(m);
  for (const cd& lambda : values) {
    Eigenpair p;
    p.lambda = lambda;
    if (wants_vector(lambda, policy)) {
      const std::vector<cd> v = inverse_iteration(m, 5, entry, lambda);
      p.vector.resize(m);
      for (std::size_t i = 0; i < n; ++i) {
        p.vector[i] = v[2 * i];
        p.vector[n + i] = v[2 * i + 1];
      }
      p.residual = eigen_residual(lp, lm, lambda, p.vector);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ReducedEigen> eigen_reduced(const DiscretizedOperator& lp, const DiscretizedOperator& lm,
                                        const VectorPolicy& policy) {
  if (lp.n != lm.n || lp.bc != lm.bc) throw ConfigError("L+ and L- live on different grids");
  const std::size_t n = lp.n;
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= 4 ? i - 4 : 0;
    const std::size_t j1 = std::min(n - 1, i + 4);
    for (std::size_t j = j0; j <= j1; ++j) dense[i * n + j] = product_entry(lm.matrix, lp.matrix, i, j);
  }
  const std::vector<cd> values = dense_nonsymmetric_eigenvalues(std::move(dense), n);

  const auto entry = [&](std::size_t i, std::size_t j) { return product_entry(lm.matrix, lp.matrix, i, j); };
  std::vector<ReducedEigen> out;
  out.reserve(n);
  for (const cd& mu2 : values) {
    ReducedEigen r;
    r.lambda_squared = mu2;
    const cd lambda = std::sqrt(mu2);
    r.kernel_like = std::abs(lambda) < policy.zero_floor;
    if (!r.kernel_like && wants_vector(lambda, policy)) r.z1 = inverse_iteration(n, 4, entry, mu2);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Eigenpair> expand_reduced(std::span<const ReducedEigen> reduced, const DiscretizedOperator& lp,
                                      const DiscretizedOperator& lm, std::size_t sector) {
  const std::size_t n = lp.n;
  std::vector<Eigenpair> out;
  out.reserve(2 * reduced.size());
  for (const ReducedEigen& r : reduced) {
    const cd root = std::sqrt(r.lambda_squared);
    for (const double sgn : {1.0, -1.0}) {
      Eigenpair p;
      p.lambda = sgn * root;
      p.sector = sector;
      if (!r.z1.empty() && !r.kernel_like) {
        std::vector<cd> lpz(n);
        lp.matrix.apply(r.z1, lpz);
        p.vector.resize(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
          p.vector[i] = r.z1[i];
          p.vector[n + i] = -lpz[i] / p.lambda;
        }
        p.residual = eigen_residual(lp, lm, p.lambda, p.vector);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

KreinResult krein_signature(const Eigenpair& pair, const DiscretizedOperator& lp, const DiscretizedOperator& lm,
                            double resolution, double re_tol) {
  if (std::abs(pair.lambda.real()) > re_tol || pair.lambda.imag() == 0.0) {
    throw ConfigError("Krein signature is defined for purely imaginary nonzero eigenvalues only");
  }
  if (!pair.has_vector()) throw ConfigError("Krein signature needs an eigenvector");
  const std::size_t n = lp.n;
  std::vector<cd> z(pair.vector);
  std::vector<cd> z1(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<cd> z2(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
  const double nrm = std::sqrt(lp.inner(z1, z1).real() + lm.inner(z2, z2).real());
  for (cd& x : z1) x /= nrm;
  for (cd& x : z2) x /= nrm;

  std::vector<cd> a(n);
  std::vector<cd> b(n);
  lp.matrix.apply(z1, a);
  lm.matrix.apply(z2, b);
  KreinResult k;
  k.form = (lp.inner(a, z1) + lm.inner(b, z2)).real();
  // <z, Jz> with Jz = (z2, -z1).
  const cd zjz = lp.inner(z1, z2) - lm.inner(z2, z1);
  k.cross_check = -pair.lambda.imag() * zjz.imag();
  k.indeterminate = std::abs(k.form) < resolution;
  k.sign = k.indeterminate ? 0 : (k.form < 0.0 ? -1 : 1);
  return k;
}

std::size_t zero_multiplicity(std::span<const Eigenpair> eigs, double zero_tol) {
  return static_cast<std::size_t>(
      std::count_if(eigs.begin(), eigs.end(), [zero_tol](const Eigenpair& p) { return std::abs(p.lambda) < zero_tol; }));
}

SpectrumReport classify(std::span<const Eigenpair> eigs, std::span<const OperatorPair> sectors, double edge,
                        const SpectrumTolerances& tol) {
  SpectrumReport report;
  report.edge = edge;

  std::vector<std::size_t> order(eigs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const cd x = eigs[a].lambda;
    const cd y = eigs[b].lambda;
    return std::pair(x.real(), x.imag()) < std::pair(y.real(), y.imag());
  });

  const double near_edge_start = edge * (1.0 - tol.edge_margin);
  double ess_min = kNaN;
  for (std::size_t idx : order) {
    const Eigenpair& p = eigs[idx];
    ClassifiedEigenvalue c;
    c.lambda = p.lambda;
    c.residual = p.residual;
    c.sector = p.sector;
    const double re = std::abs(p.lambda.real());
    const double im = std::abs(p.lambda.imag());
    if (std::abs(p.lambda) < tol.zero_tol_lambda) {
      c.cls = EigenClass::Zero;
    } else if (re > tol.re_tol) {
      c.cls = im <= tol.re_tol ? EigenClass::Real : EigenClass::Complex;
    } else if (im >= edge) {
      c.cls = EigenClass::Essential;
    } else if (im >= near_edge_start) {
      c.cls = EigenClass::NearEdge;
    } else {
      c.cls = EigenClass::Imaginary;
    }

    const bool accepted = p.has_vector() && p.residual < tol.residual_tol;
    const bool point = c.cls == EigenClass::Real || c.cls == EigenClass::Complex || c.cls == EigenClass::Imaginary;
    const bool representative = (c.cls == EigenClass::Real && p.lambda.real() > 0.0) ||
                                (c.cls == EigenClass::Complex && p.lambda.real() > 0.0 && p.lambda.imag() > 0.0) ||
                                (c.cls == EigenClass::Imaginary && p.lambda.imag() > 0.0);

    if ((c.cls == EigenClass::Imaginary || c.cls == EigenClass::NearEdge) && accepted && p.lambda.imag() != 0.0) {
      const OperatorPair& ops = sectors[p.sector];
      const KreinResult k = krein_signature(p, ops.lplus, ops.lminus, tol.krein_resolution, tol.re_tol);
      c.krein = k.sign;
    }

    switch (c.cls) {
      case EigenClass::Zero:
        ++report.zero_multiplicity;
        break;
      case EigenClass::Real:
        if (representative) ++report.counts.kr;
        break;
      case EigenClass::Complex:
        if (representative) ++report.counts.kc;
        break;
      case EigenClass::Imaginary:
        if (representative && c.krein < 0) ++report.counts.ki_minus;
        break;
      case EigenClass::NearEdge:
        if (p.lambda.imag() > 0.0) ++report.near_edge;
        break;
      case EigenClass::Essential:
        if (std::isnan(ess_min) || im < ess_min) ess_min = im;
        break;
    }
    if (point && representative && (!accepted || (c.cls == EigenClass::Imaginary && c.krein == 0))) {
      ++report.unresolved;
    }
    if (point && accepted) report.point_eigs.push_back(p);
    report.eigenvalues.push_back(c);
  }
  report.essential_cluster_min = ess_min;
  return report;
}

IndexCheck index_count_check(const SpectrumReport& report, int n_l, int n_d) {
  IndexCheck chk;
  chk.lhs = report.counts.kr + 2 * report.counts.kc + 2 * report.counts.ki_minus;
  chk.rhs = n_l - n_d;
  chk.pass = chk.lhs == chk.rhs;
  chk.conditional = report.near_edge > 0 || report.unresolved > 0;
  return chk;
}

std::vector<OperatorPair> sector_operators(const SolitonProfile& profile, bool split_parity) {
  std::vector<OperatorPair> sectors;
  if (split_parity && profile.grid.splits_by_parity()) {
    const SolitonProfile half = even_restriction(profile);
    sectors.push_back({assemble(half, OperatorKind::Lplus, BoundaryCondition::NeumannAtZero),
                       assemble(half, OperatorKind::Lminus, BoundaryCondition::NeumannAtZero)});
    sectors.push_back({assemble(half, OperatorKind::Lplus, BoundaryCondition::DirichletAtZero),
                       assemble(half, OperatorKind::Lminus, BoundaryCondition::DirichletAtZero)});
  } else {
    sectors.push_back({assemble(profile, OperatorKind::Lplus), assemble(profile, OperatorKind::Lminus)});
  }
  return sectors;
}

std::vector<Eigenpair> compute_eigenpairs(std::span<const OperatorPair> sectors, double edge,
                                          const SpectrumOptions& options) {
  const VectorPolicy policy{edge, options.tol.re_tol, options.tol.zero_tol_lambda};
  std::vector<Eigenpair> all;
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const OperatorPair& ops = sectors[s];
    std::vector<Eigenpair> part;
    if (options.route == EigenRoute::Full) {
      part = eigen_full(ops.lplus, ops.lminus, policy);
      for (Eigenpair& p : part) p.sector = s;
    } else {
      const std::vector<ReducedEigen> reduced = eigen_reduced(ops.lplus, ops.lminus, policy);
      part = expand_reduced(reduced, ops.lplus, ops.lminus, s);
    }
    std::move(part.begin(), part.end(), std::back_inserter(all));
  }
  return all;
}

SpectrumReport analyze_spectrum(const SolitonProfile& profile, const SpectrumOptions& options) {
  const double edge = essential_edge(profile.params.psi0);
  const std::vector<OperatorPair> sectors = sector_operators(profile, options.split_parity);
  const std::vector<Eigenpair> eigs = compute_eigenpairs(sectors, edge, options);

  SpectrumReport report = classify(eigs, sectors, edge, options.tol);
  report.alpha = profile.params.alpha;
  report.h = profile.params.h;
  report.branch = profile.params.branch;

  const bool full_grid = profile.grid.parity == Parity::Full;
  const std::size_t full_points = full_grid ? profile.grid.n_points : 2 * profile.grid.n_points - 1;
  const std::size_t points = std::max(options.morse_points, full_points);
  const ProfileGrid fine = ProfileGrid::full(profile.grid.half_length, points);
  const SolitonProfile morse_profile =
      profile.is_nls_limit()
          ? nls_profile(fine, profile.params.branch == Branch::Minus ? -1.0 : 1.0)
          : (points == profile.grid.n_points && full_grid ? profile : build_profile(profile.params, fine));
  report.morse_plus = morse_index(assemble(morse_profile, OperatorKind::Lplus), options.zero_tol);
  report.morse_minus = morse_index(assemble(morse_profile, OperatorKind::Lminus), options.zero_tol);
  report.d_value = d_matrix(morse_profile, SolveOptions{options.zero_tol});
  const int n_l = static_cast<int>(report.morse_plus.n_negative + report.morse_minus.n_negative);
  const int n_d = std::isnan(report.d_value) || report.d_value > 0.0 ? 0 : 1;
  report.index_check = index_count_check(report, n_l, n_d);
  // Half grids miss the odd sector; at h = 0 the kernel of L is two-dimensional.
  if (!full_grid || profile.is_nls_limit()) report.index_check.conditional = true;
  return report;
}

}  // namespace bbz
