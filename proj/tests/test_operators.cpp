#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bbz/banded.hpp"
#include "bbz/errors.hpp"
#include "bbz/operators.hpp"
#include "bbz/profiles.hpp"

using namespace bbz;

namespace {

SolitonProfile make(double alpha, Branch b, std::size_t n, double len = 0.0) {
  const SolitonParams p = params_of_alpha(alpha, b);
  return build_profile(p, ProfileGrid::full(len > 0.0 ? len : default_half_length(p.amp_A), n));
}

double max_abs_interior(const std::vector<double>& v, std::size_t skip) {
  double m = 0.0;
  for (std::size_t i = skip; i + skip < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

SymBandMatrix random_band(std::mt19937_64& rng, std::size_t n, std::size_t bw) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SymBandMatrix a(n, bw);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k <= bw && i + k < n; ++k) a.set(i + k, i, d(rng));
  }
  return a;
}

}  // namespace

TEST(Banded, SetIsSymmetricAndApplyMatchesDense) {
  std::mt19937_64 rng(3);
  const SymBandMatrix a = random_band(rng, 40, 3);
  const std::vector<double> dense = a.to_dense();
  std::vector<double> x(40);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double& v : x) v = d(rng);
  const std::vector<double> y = a.apply(x);
  for (std::size_t i = 0; i < 40; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 40; ++j) {
      ASSERT_EQ(dense[i * 40 + j], dense[j * 40 + i]);
      s += dense[i * 40 + j] * x[j];
    }
    ASSERT_NEAR(y[i], s, 1e-13);
  }
  EXPECT_EQ(a(0, 10), 0.0);
}

TEST(Banded, InertiaMatchesDenseEigenvaluesOnRandomMatrices) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> shift_dist(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + trial % 60;
    const std::size_t bw = 1 + trial % 4;
    const SymBandMatrix a = random_band(rng, n, bw);
    const std::vector<double> ev = dense_eigenvalues(a);
    const double shift = shift_dist(rng);
    const ShiftedInertia in = inertia(a, shift);
    const auto below = static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [&](double e) { return e < shift; }));
    ASSERT_EQ(in.below + in.above + in.at, n);
    ASSERT_EQ(in.below, below) << "trial " << trial;
  }
}

TEST(Banded, EigenvalueByIndexMatchesDense) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const SymBandMatrix a = random_band(rng, 30, 2);
    const std::vector<double> ev = dense_eigenvalues(a);
    for (std::size_t k : {0u, 7u, 29u}) EXPECT_NEAR(eigenvalue_by_index(a, k), ev[k], 1e-11);
  }
}

TEST(Banded, SolveAgainstApply) {
  std::mt19937_64 rng(5);
  SymBandMatrix a = random_band(rng, 50, 2);
  std::vector<double> shift(50, 6.0);
  a.add_diagonal(shift);
  std::vector<double> x(50);
  std::iota(x.begin(), x.end(), 1.0);
  const std::vector<double> b = a.apply(x);
  const std::vector<double> y = band_solve(a, b);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(y[i], x[i], 1e-10);
}

TEST(Assemble, SymmetricWithBandwidthTwo) {
  for (const Branch b : {Branch::Plus, Branch::Minus}) {
    const SolitonProfile pr = make(1.0, b, 513);
    for (const OperatorKind k : {OperatorKind::Lplus, OperatorKind::Lminus}) {
      const DiscretizedOperator op = assemble(pr, k);
      EXPECT_EQ(op.matrix.bandwidth(), 2u);
      EXPECT_EQ(op.n, 513u);
      const std::vector<double> d = op.matrix.to_dense();
      for (std::size_t i = 0; i < op.n; ++i)
        for (std::size_t j = 0; j < op.n; ++j) ASSERT_EQ(d[i * op.n + j], d[j * op.n + i]);
    }
  }
  const SolitonProfile half = even_restriction(make(1.0, Branch::Minus, 513));
  const DiscretizedOperator even = assemble(half, OperatorKind::Lplus, BoundaryCondition::NeumannAtZero);
  const std::vector<double> d = even.matrix.to_dense();
  for (std::size_t i = 0; i < even.n; ++i)
    for (std::size_t j = 0; j < even.n; ++j) ASSERT_EQ(d[i * even.n + j], d[j * even.n + i]);
}

TEST(Assemble, Errors) {
  EXPECT_THROW(assemble(make(1.0, Branch::Minus, 9, 50.0), OperatorKind::Lplus), ConfigError);
  EXPECT_THROW(assemble(make(1.0, Branch::Minus, 513), OperatorKind::Lplus, BoundaryCondition::NeumannAtZero),
               ConfigError);
  EXPECT_EQ(natural_bc(ProfileGrid::even_half(40.0, 100)), BoundaryCondition::NeumannAtZero);
  EXPECT_EQ(natural_bc(ProfileGrid::full(40.0, 100)), BoundaryCondition::Dirichlet);
}

TEST(Assemble, TranslationalKernelOfLplus) {
  for (const Branch b : {Branch::Plus, Branch::Minus}) {
    const SolitonProfile pr = make(1.0, b, 4096, 50.0);
    const DiscretizedOperator lp = assemble(pr, OperatorKind::Lplus);
    EXPECT_LT(max_abs_interior(lp.matrix.apply(pr.u_prime_values), 2), 1e-4);
  }
}

TEST(Assemble, KernelOfLminusAtZeroPump) {
  const SolitonProfile s = nls_profile(ProfileGrid::full(40.0, 4096));
  const DiscretizedOperator lm = assemble(s, OperatorKind::Lminus);
  EXPECT_LT(max_abs_interior(lm.matrix.apply(s.u_values), 2), 1e-4);
}

TEST(Assemble, KernelResidualIsFourthOrder) {
  const SolitonProfile c = make(2.0, Branch::Minus, 1025);
  const SolitonProfile f = make(2.0, Branch::Minus, 2049);
  const double rc = max_abs_interior(assemble(c, OperatorKind::Lplus).matrix.apply(c.u_prime_values), 2);
  const double rf = max_abs_interior(assemble(f, OperatorKind::Lplus).matrix.apply(f.u_prime_values), 2);
  EXPECT_GT(rc / rf, 12.0);
  EXPECT_LT(rc / rf, 20.0);
}

TEST(Assemble, ConstantPotentialGroundState) {
  const double psi0 = params_of_alpha(1.0, Branch::Minus).psi0;
  const ProfileGrid g = ProfileGrid::full(40.0, 801);
  const std::vector<double> v(801, 1.0 - 6.0 * psi0 * psi0);
  const DiscretizedOperator op = assemble_schrodinger(g, v, BoundaryCondition::Dirichlet, OperatorKind::Lplus);
  const double box = std::numbers::pi / (2.0 * 40.0 + 2.0 * g.spacing);
  const double lowest = eigenvalue_by_index(op.matrix, 0);
  EXPECT_NEAR(lowest, 1.0 - 6.0 * psi0 * psi0, 2e-3);
  EXPECT_NEAR(lowest, 1.0 - 6.0 * psi0 * psi0 + box * box, 1e-5);
}

TEST(Assemble, ParitySectorsReproduceFullSpectrum) {
  const SolitonProfile full = make(1.5, Branch::Minus, 129, 40.0);
  const SolitonProfile half = even_restriction(full);
  for (const OperatorKind k : {OperatorKind::Lplus, OperatorKind::Lminus}) {
    std::vector<double> all = dense_eigenvalues(assemble(full, k).matrix);
    std::vector<double> split = dense_eigenvalues(assemble(half, k, BoundaryCondition::NeumannAtZero).matrix);
    const std::vector<double> odd = dense_eigenvalues(assemble(half, k, BoundaryCondition::DirichletAtZero).matrix);
    split.insert(split.end(), odd.begin(), odd.end());
    std::sort(split.begin(), split.end());
    ASSERT_EQ(split.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_NEAR(split[i], all[i], 1e-10);
  }
}

TEST(Assemble, CoordinateBasisRoundTripAndInner) {
  const SolitonProfile half = even_restriction(make(1.0, Branch::Plus, 513));
  const DiscretizedOperator even = assemble(half, OperatorKind::Lplus, BoundaryCondition::NeumannAtZero);
  const std::vector<double> c = even.to_operator_basis(half.phi_values);
  const std::vector<double> back = even.to_samples(c);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back[i], half.phi_values[i], 1e-15);

  const SolitonProfile full = make(1.0, Branch::Plus, 513);
  const DiscretizedOperator lp = assemble(full, OperatorKind::Lplus);
  const double f = lp.inner(full.phi_values, full.phi_values);
  EXPECT_NEAR(even.inner(c, c), f, 1e-12 * f);
}

TEST(EssentialEdge, Values) {
  EXPECT_DOUBLE_EQ(essential_edge(0.0), 1.0);
  EXPECT_NEAR(essential_edge(params_of_alpha(1.0, Branch::Minus).psi0), 0.62942333136293673, 1e-14);
  EXPECT_NEAR(essential_edge(std::sqrt(1.0 / 6.0)), 0.0, 1e-7);
  EXPECT_THROW(essential_edge(0.5), DomainError);
  double prev = 0.0;
  for (double a = 0.2; a < 10.0; a += 0.1) {
    const double e = essential_edge(params_of_alpha(a, Branch::Minus).psi0);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(Morse, MinusBranchAtAlphaTwo) {
  const SolitonProfile pr = make(2.0, Branch::Minus, 16385);
  const InertiaResult p = morse_index(assemble(pr, OperatorKind::Lplus));
  const InertiaResult m = morse_index(assemble(pr, OperatorKind::Lminus));
  EXPECT_EQ(p.n_negative, 1u);
  EXPECT_EQ(p.n_zero, 1u);
  EXPECT_EQ(m.n_negative, 1u);
  EXPECT_EQ(m.n_zero, 0u);
  EXPECT_EQ(p.n_negative + p.n_zero + p.n_positive, pr.grid.n_points);
  EXPECT_THROW(morse_index(assemble(pr, OperatorKind::Lplus), 0.0), ConfigError);
}

TEST(Morse, SmallestMagnitudeIsTranslational) {
  const SolitonProfile pr = make(2.0, Branch::Minus, 2049);
  const double e = smallest_magnitude_eigenvalue(assemble(pr, OperatorKind::Lplus));
  EXPECT_LT(std::abs(e), 1e-3);
  const double e2 = smallest_magnitude_eigenvalue(assemble(make(2.0, Branch::Minus, 4097), OperatorKind::Lplus));
  EXPECT_LT(std::abs(e2), std::abs(e) / 8.0);
}

TEST(Solve, ZeroRhsGivesZero) {
  const SolitonProfile pr = make(2.0, Branch::Minus, 1025);
  const DiscretizedOperator lm = assemble(pr, OperatorKind::Lminus);
  const SolveResult r = solve_indefinite(lm, std::vector<double>(lm.n, 0.0));
  for (const double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Solve, LminusOnDerivativeHasPositiveForm) {
  const SolitonProfile pr = make(2.0, Branch::Minus, 2049);
  const DiscretizedOperator lm = assemble(pr, OperatorKind::Lminus);
  const SolveResult r = solve_indefinite(lm, pr.u_prime_values);
  EXPECT_FALSE(r.projected);
  EXPECT_LT(r.residual, 1e-8);
  EXPECT_GT(lm.inner(r.x, pr.u_prime_values), 0.0);
}

TEST(Solve, ProjectedSolveAtZeroPump) {
  const SolitonProfile s = nls_profile(ProfileGrid::full(40.0, 4097));
  const DiscretizedOperator lp = assemble(s, OperatorKind::Lplus);
  const SolveResult r = solve_indefinite(lp, s.u_values);
  EXPECT_TRUE(r.projected);
  EXPECT_NEAR(lp.inner(r.x, s.u_values), -0.5, 1e-6);
  // 1 + v with L+ v = 6 u0^2 is 1 - 2 sech^2.
  std::vector<double> rhs(s.u_values.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 6.0 * s.u_values[i] * s.u_values[i];
  const std::vector<double> v = solve_samples(lp, rhs);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sech = 1.0 / std::cosh(s.x_values[i]);
    worst = std::max(worst, std::abs(1.0 + v[i] - (1.0 - 2.0 * sech * sech)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Solve, NonOrthogonalRhsOnKernelThrows) {
  const SolitonProfile s = nls_profile(ProfileGrid::full(40.0, 1025));
  const DiscretizedOperator lp = assemble(s, OperatorKind::Lplus);
  EXPECT_THROW(solve_indefinite(lp, s.u_prime_values), ComputationError);
  EXPECT_THROW(solve_indefinite(lp, std::vector<double>(3, 1.0)), ConfigError);
}

TEST(DMatrix, PositiveOnBothBranches) {
  for (const double a : {0.5, 1.0, 2.0, 4.0, 6.0}) {
    const SolitonProfile pr = make(a, Branch::Minus, 4097);
    EXPECT_GT(d_matrix(pr), 0.0) << a;
  }
  EXPECT_GT(d_matrix(make(1.0, Branch::Plus, 4097)), 0.0);
  EXPECT_NEAR(d_matrix(nls_profile(ProfileGrid::full(40.0, 4097))), 0.5, 1e-6);
  EXPECT_THROW(d_matrix(even_restriction(make(1.0, Branch::Plus, 513))), ConfigError);
}

TEST(PhiIdentity, ResidualAndQuadraticForm) {
  for (const double a : {1.0, 3.0}) {
    const SolitonProfile pr = make(a, Branch::Minus, 4097);
    EXPECT_LT(phi_identity_residual(pr), 1e-4) << a;
    const double q = lminus_quadratic_form(pr);
    const double qm = lminus_quadratic_form_matrix(pr);
    EXPECT_LT(q, 0.0);
    EXPECT_NEAR(q, qm, 1e-4 * std::abs(q)) << a;
  }
}

TEST(PhiIdentity, QuadraticFormNegativeForRandomAlpha) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(0.3, 8.0);
  for (int i = 0; i < 25; ++i) {
    const double a = d(rng);
    const SolitonProfile pr = make(a, Branch::Minus, 1025);
    ASSERT_LT(lminus_quadratic_form(pr), 0.0) << a;
  }
}

TEST(Export, CoordinateFormat) {
  const DiscretizedOperator op = assemble(make(1.0, Branch::Minus, 33, 50.0), OperatorKind::Lplus);
  std::ostringstream os;
  write_coordinate_format(op, os);
  std::istringstream is(os.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    ASSERT_TRUE(ls >> i >> j >> v) << line;
    EXPECT_DOUBLE_EQ(v, op.matrix(i, j));
    ++count;
  }
  EXPECT_EQ(count, 33u + 2u * 32u + 2u * 31u);
}
