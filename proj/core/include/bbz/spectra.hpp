#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "bbz/operators.hpp"
#include "bbz/profiles.hpp"

namespace bbz {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// L+ and L- on one grid or one parity sector.
struct OperatorPair {
  DiscretizedOperator lplus;
  DiscretizedOperator lminus;
};

/// Eigenvalue of JL = [[0, L-], [-L+, 0]] with an optional eigenvector
/// (z1, z2) stored back to back in operator coordinates of its sector.
struct Eigenpair {
  std::complex<double> lambda;
  std::vector<std::complex<double>> vector;
  double residual = kNaN;  // |JL z - lambda z|_inf / |z|_inf
  std::size_t sector = 0;

  bool has_vector() const { return !vector.empty(); }
  std::span<const std::complex<double>> z1() const { return std::span(vector).first(vector.size() / 2); }
  std::span<const std::complex<double>> z2() const { return std::span(vector).last(vector.size() / 2); }
};

/// Which eigenvalues get eigenvectors. Vectors are computed for
/// |Im lambda| < band or |Re lambda| > re_floor, skipping |lambda| < zero_floor.
struct VectorPolicy {
  double band = 0.0;
  double re_floor = 1e-6;
  double zero_floor = 1e-2;
};

/// Eigenvalues of a dense real n x n row-major matrix (LAPACK dgeev, no vectors).
std::vector<std::complex<double>> dense_nonsymmetric_eigenvalues(std::vector<double> row_major, std::size_t n);

/// All 2n eigenvalues of the block matrix, dense; eigenvectors by inverse
/// iteration on the interleaved band form for those selected by `policy`.
std::vector<Eigenpair> eigen_full(const DiscretizedOperator& lp, const DiscretizedOperator& lm,
                                  const VectorPolicy& policy);

struct ReducedEigen {
  std::complex<double> lambda_squared;
  std::vector<std::complex<double>> z1;  // empty unless selected
  bool kernel_like = false;              // |lambda| below the zero floor
};

/// Eigenvalues of -L- L+ (n x n), the square of the spectrum of JL.
std::vector<ReducedEigen> eigen_reduced(const DiscretizedOperator& lp, const DiscretizedOperator& lm,
                                        const VectorPolicy& policy);

/// lambda = +-sqrt(lambda^2) with z2 = -L+ z1 / lambda and residuals on the full block system.
std::vector<Eigenpair> expand_reduced(std::span<const ReducedEigen> reduced, const DiscretizedOperator& lp,
                                      const DiscretizedOperator& lm, std::size_t sector = 0);

/// Residual |JL z - lambda z|_inf / |z|_inf of a candidate pair.
double eigen_residual(const DiscretizedOperator& lp, const DiscretizedOperator& lm, std::complex<double> lambda,
                      std::span<const std::complex<double>> z);

enum class EigenClass { Zero, Real, Complex, Imaginary, NearEdge, Essential };
std::string_view to_string(EigenClass cls);

struct SpectrumTolerances {
  double zero_tol_lambda = 1e-2;  // |lambda| below this is part of the zero cluster
  double re_tol = 1e-6;           // |Re lambda| below this is attributed to discretization
  double edge_margin = 0.03;      // relative band below the essential edge flagged near-edge
  double residual_tol = 1e-6;
  double krein_resolution = 1e-9;
};

struct KreinResult {
  int sign = 0;             // -1, +1, or 0 when indeterminate
  double form = 0.0;        // <L z, z> with |z| = 1
  double cross_check = 0.0; // -Im(lambda) * Im<z, J z>, equal to form for exact pairs
  bool indeterminate = false;
};

/// Krein signature of a purely imaginary, nonzero eigenpair. Throws
/// ConfigError for real or complex eigenvalues or a missing eigenvector.
KreinResult krein_signature(const Eigenpair& pair, const DiscretizedOperator& lp, const DiscretizedOperator& lm,
                            double resolution = 1e-9, double re_tol = 1e-6);

struct IndexCounts {
  int kr = 0;
  int kc = 0;
  int ki_minus = 0;
};

struct ClassifiedEigenvalue {
  std::complex<double> lambda;
  EigenClass cls = EigenClass::Essential;
  int krein = 0;  // nonzero only for resolved imaginary pairs
  double residual = kNaN;
  std::size_t sector = 0;
};

struct IndexCheck {
  int lhs = 0;  // kr + 2 kc + 2 ki-
  int rhs = 0;  // n(L) - n(D)
  bool pass = false;
  bool conditional = false;
};

struct SpectrumReport {
  double alpha = kNaN;
  double h = kNaN;
  Branch branch = Branch::Minus;
  double edge = kNaN;
  std::vector<ClassifiedEigenvalue> eigenvalues;  // sorted by (Re, Im)
  std::vector<Eigenpair> point_eigs;              // accepted gap / unstable eigenpairs
  double essential_cluster_min = kNaN;
  std::size_t zero_multiplicity = 0;
  IndexCounts counts;
  std::size_t near_edge = 0;
  std::size_t unresolved = 0;  // point eigenvalues without an acceptable vector or Krein sign

  // Filled by analyze_spectrum.
  InertiaResult morse_plus;
  InertiaResult morse_minus;
  double d_value = kNaN;
  IndexCheck index_check;
};

/// Sorts, classifies and Krein-labels eigenvalues. `sectors[k]` holds the
/// operators of the eigenpairs with sector == k.
SpectrumReport classify(std::span<const Eigenpair> eigs, std::span<const OperatorPair> sectors, double edge,
                        const SpectrumTolerances& tol);

std::size_t zero_multiplicity(std::span<const Eigenpair> eigs, double zero_tol);

/// kr + 2 kc + 2 ki- against n(L) - n(D). Conditional when near-edge or
/// unresolved eigenvalues were excluded from the counts.
IndexCheck index_count_check(const SpectrumReport& report, int n_l, int n_d);

enum class EigenRoute { Reduced, Full };

struct SpectrumOptions {
  SpectrumTolerances tol;
  double zero_tol = kDefaultZeroTol;  // operator level (Morse indices, solves)
  EigenRoute route = EigenRoute::Reduced;
  /// Full grids with an odd point count are solved as even + odd sectors.
  bool split_parity = true;
  /// Morse indices and D use a Full grid of this many points on the same
  /// interval (inertia is linear in n); 0 keeps the spectral grid. The
  /// translational eigenvalue of L+ is off zero by O(dx^4).
  std::size_t morse_points = 16385;
};

/// Sector operators used for a profile: {even, odd} for splittable Full
/// grids, otherwise the natural single operator pair.
std::vector<OperatorPair> sector_operators(const SolitonProfile& profile, bool split_parity);

/// End-to-end: assemble, Morse indices, D-matrix, eigensolve, classify and
/// check the index count. EvenHalf grids only see the even sector; their
/// index check is marked conditional.
SpectrumReport analyze_spectrum(const SolitonProfile& profile, const SpectrumOptions& options = {});

/// Eigenpairs of all sectors (route per options), before classification.
std::vector<Eigenpair> compute_eigenpairs(std::span<const OperatorPair> sectors, double edge,
                                          const SpectrumOptions& options);

}  // namespace bbz
