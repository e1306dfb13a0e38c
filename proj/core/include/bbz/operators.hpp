#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "bbz/banded.hpp"
#include "bbz/profiles.hpp"

namespace bbz {

enum class OperatorKind { Lplus, Lminus };

/// Dirichlet: perturbation vanishes beyond the last grid point on each side.
/// NeumannAtZero / DirichletAtZero: the even / odd sector of a symmetric
/// problem on an EvenHalf grid (Dirichlet at x = L in both cases).
enum class BoundaryCondition { Dirichlet, NeumannAtZero, DirichletAtZero };

std::string_view to_string(OperatorKind kind);
std::string_view to_string(BoundaryCondition bc);

/// Discretized L+ = -d^2/dx^2 + 1 - 6u^2 or L- = -d^2/dx^2 + 1 - 2u^2.
///
/// The matrix acts on "operator coordinates". For Dirichlet and
/// DirichletAtZero these are plain grid samples; for NeumannAtZero the x = 0
/// sample is scaled by 1/sqrt(2), which keeps the even-extension stencil
/// symmetric. Use to_operator_basis / to_samples to move between the two,
/// and inner() for the quadrature that matches the full-line integral.
struct DiscretizedOperator {
  SymBandMatrix matrix;
  std::size_t n = 0;
  double spacing = 0.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  OperatorKind label = OperatorKind::Lplus;
  /// Index into the profile grid of the first unknown (1 for DirichletAtZero).
  std::size_t first_sample = 0;

  /// Quadrature weight per unknown in operator coordinates.
  double weight() const { return bc == BoundaryCondition::Dirichlet ? spacing : 2.0 * spacing; }

  std::vector<double> to_operator_basis(std::span<const double> samples) const;
  std::vector<double> to_samples(std::span<const double> coords) const;

  /// Full-line quadrature of f * g for vectors in operator coordinates.
  double inner(std::span<const double> f, std::span<const double> g) const;
  /// sum w f conj(g)
  std::complex<double> inner(std::span<const std::complex<double>> f,
                             std::span<const std::complex<double>> g) const;
};

struct InertiaResult {
  std::size_t n_negative = 0;
  std::size_t n_zero = 0;
  std::size_t n_positive = 0;
  double zero_tol = 0.0;
  bool used_fallback = false;
};

inline constexpr double kDefaultZeroTol = 1e-6;
inline constexpr std::size_t kMinOperatorSize = 16;

/// Boundary condition matching the grid: Dirichlet for Full, NeumannAtZero for EvenHalf.
BoundaryCondition natural_bc(const ProfileGrid& grid);

DiscretizedOperator assemble(const SolitonProfile& profile, OperatorKind which, BoundaryCondition bc);
DiscretizedOperator assemble(const SolitonProfile& profile, OperatorKind which);

/// -d^2/dx^2 + potential on the given grid, same stencil and closures as assemble().
DiscretizedOperator assemble_schrodinger(const ProfileGrid& grid, std::span<const double> potential,
                                         BoundaryCondition bc, OperatorKind label);

/// Lower edge of the essential spectrum of JL on the imaginary axis.
double essential_edge(double psi0);

InertiaResult morse_index(const DiscretizedOperator& op, double zero_tol = kDefaultZeroTol);

/// Eigenvalue of smallest magnitude (bisection on inertia counts).
double smallest_magnitude_eigenvalue(const DiscretizedOperator& op);

struct SolveOptions {
  double zero_tol = kDefaultZeroTol;
  /// Largest admissible |<rhs, kernel>| / (|rhs| |kernel|) for a projected solve.
  double solvability_tol = 1e-6;
};

struct SolveResult {
  std::vector<double> x;         // operator coordinates
  bool projected = false;        // solved on the complement of a one-dimensional numerical kernel
  std::vector<double> kernel;    // normalized kernel vector when projected
  double residual = 0.0;         // |A x - rhs_projected|_inf / |rhs|_inf
};

/// Solves op x = rhs (operator coordinates). With a one-dimensional numerical
/// kernel the rhs must be orthogonal to it; rhs and x are projected onto the
/// complement.
SolveResult solve_indefinite(const DiscretizedOperator& op, std::span<const double> rhs,
                             const SolveOptions& options = {});

/// Same as solve_indefinite but on grid samples in and out.
std::vector<double> solve_samples(const DiscretizedOperator& op, std::span<const double> rhs_samples,
                                  const SolveOptions& options = {});

/// The single D-matrix entry <L-^{-1} u', u'>. Needs a Dirichlet (Full grid) profile.
double d_matrix(const SolitonProfile& profile, const SolveOptions& options = {});

/// max |L- phi - 2 psi0^2 phi (2 + phi)| over interior points (minus branch).
double phi_identity_residual(const SolitonProfile& profile);

/// 2 psi0^2 * integral of phi^2 (2 + phi) (minus branch); equals <L- phi, phi>.
double lminus_quadratic_form(const SolitonProfile& profile);

/// <L- phi, phi> from the assembled matrix, the cross-check of lminus_quadratic_form.
double lminus_quadratic_form_matrix(const SolitonProfile& profile);

/// Debug export, one "i j value" line per stored entry of the full symmetric matrix.
void write_coordinate_format(const DiscretizedOperator& op, std::ostream& out);

}  // namespace bbz
