#include "bbz/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "bbz/errors.hpp"
#include "bbz/format.hpp"

namespace bbz {

std::string_view to_string(OperatorKind kind) { return kind == OperatorKind::Lplus ? "Lplus" : "Lminus"; }

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Dirichlet:
      return "Dirichlet";
    case BoundaryCondition::NeumannAtZero:
      return "NeumannAtZero";
    case BoundaryCondition::DirichletAtZero:
      return "DirichletAtZero";
  }
  return "?";
}

namespace {

// Fourth-order central stencil for -d^2/dx^2, times 12 dx^2.
constexpr double kC0 = 30.0;
constexpr double kC1 = -16.0;
constexpr double kC2 = 1.0;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> potential_of(const SolitonProfile& profile, OperatorKind which) {
  const double c = which == OperatorKind::Lplus ? 6.0 : 2.0;
  std::vector<double> q(profile.u_values.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 1.0 - c * profile.u_values[i] * profile.u_values[i];
  return q;
}

}  // namespace

std::vector<double> DiscretizedOperator::to_operator_basis(std::span<const double> samples) const {
  std::vector<double> v(samples.begin() + static_cast<std::ptrdiff_t>(first_sample),
                        samples.begin() + static_cast<std::ptrdiff_t>(first_sample + n));
  if (bc == BoundaryCondition::NeumannAtZero) v[0] *= std::numbers::sqrt2 / 2.0;
  return v;
}

std::vector<double> DiscretizedOperator::to_samples(std::span<const double> coords) const {
  std::vector<double> v(first_sample + n, 0.0);
  std::copy(coords.begin(), coords.end(), v.begin() + static_cast<std::ptrdiff_t>(first_sample));
  if (bc == BoundaryCondition::NeumannAtZero) v[0] *= std::numbers::sqrt2;
  return v;
}

double DiscretizedOperator::inner(std::span<const double> f, std::span<const double> g) const {
  return weight() * dot(f, g);
}

std::complex<double> DiscretizedOperator::inner(std::span<const std::complex<double>> f,
                                                std::span<const std::complex<double>> g) const {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return weight() * s;
}

BoundaryCondition natural_bc(const ProfileGrid& grid) {
  return grid.parity == Parity::Full ? BoundaryCondition::Dirichlet : BoundaryCondition::NeumannAtZero;
}

DiscretizedOperator assemble_schrodinger(const ProfileGrid& grid, std::span<const double> potential,
                                         BoundaryCondition bc, OperatorKind label) {
  const bool half_grid = grid.parity == Parity::EvenHalf;
  if ((bc == BoundaryCondition::Dirichlet) == half_grid) {
    throw ConfigError("boundary condition " + std::string(to_string(bc)) + " does not match a " +
                      std::string(to_string(grid.parity)) + " grid");
  }
  DiscretizedOperator op;
  op.bc = bc;
  op.label = label;
  op.spacing = grid.spacing;
  op.first_sample = bc == BoundaryCondition::DirichletAtZero ? 1 : 0;
  op.n = grid.n_points - op.first_sample;
  if (op.n < kMinOperatorSize) {
    throw ConfigError("operator needs at least " + std::to_string(kMinOperatorSize) + " unknowns, got " +
                      std::to_string(op.n));
  }

  const double s = 1.0 / (12.0 * grid.spacing * grid.spacing);
  const std::size_t n = op.n;
  SymBandMatrix m(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    m.set(i, i, kC0 * s);
    if (i + 1 < n) m.set(i + 1, i, kC1 * s);
    if (i + 2 < n) m.set(i + 2, i, kC2 * s);
  }
  if (bc == BoundaryCondition::NeumannAtZero) {
    // Even extension v(-x) = v(x), symmetrized with the sqrt(1/2) scaling of the x = 0 unknown.
    m.set(1, 1, (kC0 + kC2) * s);
    m.set(1, 0, std::numbers::sqrt2 * kC1 * s);
    m.set(2, 0, std::numbers::sqrt2 * kC2 * s);
  } else if (bc == BoundaryCondition::DirichletAtZero) {
    // Odd extension v(-x) = -v(x), v(0) = 0: the mirror of x_1 enters row x_1.
    m.set(0, 0, (kC0 - kC2) * s);
  }
  m.add_diagonal(potential.subspan(op.first_sample, n));
  op.matrix = std::move(m);
  return op;
}

DiscretizedOperator assemble(const SolitonProfile& profile, OperatorKind which, BoundaryCondition bc) {
  const std::vector<double> q = potential_of(profile, which);
  return assemble_schrodinger(profile.grid, q, bc, which);
}

DiscretizedOperator assemble(const SolitonProfile& profile, OperatorKind which) {
  return assemble(profile, which, natural_bc(profile.grid));
}

double essential_edge(double psi0) {
  const double p2 = psi0 * psi0;
  if (!std::isfinite(psi0) || p2 > 1.0 / 6.0) throw DomainError("essential_edge needs psi0^2 <= 1/6");
  return std::sqrt(std::max(0.0, (1.0 - 6.0 * p2) * (1.0 - 2.0 * p2)));
}

InertiaResult morse_index(const DiscretizedOperator& op, double zero_tol) {
  if (!(zero_tol > 0.0)) throw ConfigError("zero_tol must be positive");
  const ShiftedInertia lower = inertia(op.matrix, -zero_tol);
  const ShiftedInertia upper = inertia(op.matrix, zero_tol);
  InertiaResult r;
  r.zero_tol = zero_tol;
  r.n_negative = lower.below;
  r.n_zero = upper.below + upper.at - lower.below;
  r.n_positive = op.n - r.n_negative - r.n_zero;
  r.used_fallback = lower.used_fallback || upper.used_fallback;
  return r;
}

double smallest_magnitude_eigenvalue(const DiscretizedOperator& op) {
  const std::size_t negatives = inertia(op.matrix, 0.0).below;
  const double above = eigenvalue_by_index(op.matrix, negatives);
  if (negatives == 0) return above;
  const double below = eigenvalue_by_index(op.matrix, negatives - 1);
  return std::abs(below) < std::abs(above) ? below : above;
}

namespace {

std::vector<double> kernel_vector(const DiscretizedOperator& op) {
  const std::size_t n = op.n;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i) + 0.1);
  for (int it = 0; it < 4; ++it) {
    v = band_solve(op.matrix, v);
    const double nrm = std::sqrt(dot(v, v));
    for (double& x : v) x /= nrm;
  }
  return v;
}

double residual_ratio(const DiscretizedOperator& op, std::span<const double> x, std::span<const double> rhs) {
  std::vector<double> r = op.matrix.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  const double scale = max_abs(rhs);
  return scale == 0.0 ? max_abs(r) : max_abs(r) / scale;
}

}  // namespace

SolveResult solve_indefinite(const DiscretizedOperator& op, std::span<const double> rhs, const SolveOptions& options) {
  if (rhs.size() != op.n) throw ConfigError("rhs length does not match operator size");
  SolveResult out;
  if (max_abs(rhs) == 0.0) {
    out.x.assign(op.n, 0.0);
    return out;
  }

  const InertiaResult in = morse_index(op, options.zero_tol);
  std::vector<double> b(rhs.begin(), rhs.end());
  if (in.n_zero > 1) {
    throw ComputationError("operator has a " + std::to_string(in.n_zero) +
                           "-dimensional numerical kernel; projected solves support one dimension");
  }
  if (in.n_zero == 1) {
    out.projected = true;
    out.kernel = kernel_vector(op);
    const double along = dot(b, out.kernel);
    const double cosine = std::abs(along) / std::sqrt(dot(b, b));
    if (cosine > options.solvability_tol) {
      throw ComputationError("right-hand side is not orthogonal to the numerical kernel (cosine " +
                             std::to_string(cosine) + "); no bounded solution");
    }
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= along * out.kernel[i];
  }
  out.x = band_solve(op.matrix, b);
  if (out.projected) {
    const double along = dot(out.x, out.kernel);
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] -= along * out.kernel[i];
  }
  out.residual = residual_ratio(op, out.x, b);
  if (!(out.residual < 1e-8)) {
    throw ComputationError("indefinite solve residual " + std::to_string(out.residual) + " above 1e-8");
  }
  return out;
}

std::vector<double> solve_samples(const DiscretizedOperator& op, std::span<const double> rhs_samples,
                                  const SolveOptions& options) {
  const std::vector<double> b = op.to_operator_basis(rhs_samples);
  return op.to_samples(solve_indefinite(op, b, options).x);
}

double d_matrix(const SolitonProfile& profile, const SolveOptions& options) {
  if (profile.grid.parity != Parity::Full) throw ConfigError("d_matrix needs a Full grid (u' is odd)");
  const DiscretizedOperator lm = assemble(profile, OperatorKind::Lminus);
  if (!profile.is_nls_limit()) {
    const InertiaResult in = morse_index(lm, options.zero_tol);
    if (in.n_zero != 0) {
      throw ComputationError("L- is numerically singular on this grid although zero is not an eigenvalue of L-; "
                             "refine the discretization");
    }
  }
  const std::vector<double> b = lm.to_operator_basis(profile.u_prime_values);
  const SolveResult sol = solve_indefinite(lm, b, options);
  return lm.inner(sol.x, b);
}

namespace {

// -f'' + (1 - 2u^2) f at grid point i, full stencil (mirror near x = 0 on EvenHalf grids).
template <class At>
double lminus_apply_at(At at, std::ptrdiff_t i, double u, double dx2) {
  const double fpp = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) / (12.0 * dx2);
  return -fpp + (1.0 - 2.0 * u * u) * at(i);
}

}  // namespace

double phi_identity_residual(const SolitonProfile& profile) {
  const auto& phi = profile.phi_values;
  const auto& u = profile.u_values;
  const std::size_t n = phi.size();
  const double dx2 = profile.grid.spacing * profile.grid.spacing;
  const double p2 = profile.params.psi0 * profile.params.psi0;
  const bool half = profile.grid.parity == Parity::EvenHalf;
  const auto at = [&](std::ptrdiff_t k) { return phi[static_cast<std::size_t>(k < 0 ? -k : k)]; };
  double worst = 0.0;
  for (std::ptrdiff_t i = half ? 0 : 2; i <= static_cast<std::ptrdiff_t>(n) - 3; ++i) {
    const double p = phi[static_cast<std::size_t>(i)];
    const double lhs = lminus_apply_at(at, i, u[static_cast<std::size_t>(i)], dx2);
    worst = std::max(worst, std::abs(lhs - 2.0 * p2 * p * (2.0 + p)));
  }
  return worst;
}

double lminus_quadratic_form(const SolitonProfile& profile) {
  const auto& phi = profile.phi_values;
  const std::size_t n = phi.size();
  const double dx = profile.grid.spacing;
  const auto f = [&](std::size_t i) { return phi[i] * phi[i] * (2.0 + phi[i]); };
  double sum = 0.0;
  if (profile.grid.parity == Parity::Full) {
    for (std::size_t i = 1; i + 1 < n; ++i) sum += f(i);
    sum += 0.5 * (f(0) + f(n - 1));
    sum *= dx;
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) sum += 2.0 * f(i);
    sum += f(0) + f(n - 1);
    sum *= dx;
  }
  return 2.0 * profile.params.psi0 * profile.params.psi0 * sum;
}

double lminus_quadratic_form_matrix(const SolitonProfile& profile) {
  const DiscretizedOperator lm = assemble(profile, OperatorKind::Lminus);
  const std::vector<double> v = lm.to_operator_basis(profile.phi_values);
  return lm.inner(lm.matrix.apply(v), v);
}

void write_coordinate_format(const DiscretizedOperator& op, std::ostream& out) {
  const std::size_t n = op.n;
  const std::size_t bw = op.matrix.bandwidth();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= bw ? i - bw : 0;
    const std::size_t j1 = std::min(n - 1, i + bw);
    for (std::size_t j = j0; j <= j1; ++j) {
      out << i << ' ' << j << ' ' << format_real(op.matrix(i, j)) << '\n';
    }
  }
}

}  // namespace bbz
