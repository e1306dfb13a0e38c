#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bbz/errors.hpp"
#include "bbz/profiles.hpp"

using namespace bbz;

namespace {

// 30-digit evaluations of the closed forms, rounded to double.
constexpr double kH1 = 0.24345025560803715;
constexpr double kPsi1 = 0.29457168601541303;
constexpr double kA1 = 0.69236199403796098;
constexpr double kUMinus0 = -1.2036674145259334;
constexpr double kUPlus0 = 0.61452404249510738;

std::vector<double> random_alphas(std::size_t count, std::uint64_t seed, double lo = 0.3, double hi = 8.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> out(count);
  for (double& a : out) a = d(rng);
  return out;
}

SolitonProfile make(double alpha, Branch b, std::size_t n, double len = 0.0) {
  const SolitonParams p = params_of_alpha(alpha, b);
  return build_profile(p, ProfileGrid::full(len > 0.0 ? len : default_half_length(p.amp_A), n));
}

}  // namespace

TEST(Params, FrozenValuesAtAlphaOne) {
  const SolitonParams p = params_of_alpha(1.0, Branch::Minus);
  EXPECT_NEAR(h_of_alpha(1.0), kH1, 1e-15);
  EXPECT_NEAR(p.psi0, kPsi1, 1e-15);
  EXPECT_NEAR(p.amp_A, kA1, 1e-15);
}

TEST(Params, CollisionPumpAndInverse) {
  EXPECT_NEAR(h_of_alpha(2.5327), 0.077492557408203, 1e-12);
  EXPECT_NEAR(alpha_of_h(0.07749), 2.5327347034523774, 1e-10);
  EXPECT_NEAR(alpha_of_h(0.243450), 1.0, 1e-4);
}

TEST(Params, Limits) {
  EXPECT_NEAR(h_of_alpha(1e-6), kMaxPump, 1e-10);
  EXPECT_NEAR(kMaxPump, 2.0 / (3.0 * std::sqrt(6.0)), 1e-16);
  // h is flat to fourth order at alpha = 0, so alpha ~ (kMaxPump - h)^(1/4).
  const double near_top = kMaxPump * (1.0 - 1e-9);
  EXPECT_LT(alpha_of_h(near_top), 0.02);
  EXPECT_NEAR(h_of_alpha(alpha_of_h(near_top)), near_top, 1e-15);
  const SolitonParams far = params_of_alpha(30.0, Branch::Plus);
  EXPECT_LT(far.psi0, 1e-12);
  EXPECT_NEAR(far.amp_A, 1.0, 1e-12);
}

TEST(Params, DomainErrors) {
  EXPECT_THROW(h_of_alpha(0.0), DomainError);
  EXPECT_THROW(h_of_alpha(-1.0), DomainError);
  EXPECT_THROW(h_of_alpha(NAN), DomainError);
  EXPECT_THROW(alpha_of_h(0.0), DomainError);
  EXPECT_THROW(alpha_of_h(kMaxPump), DomainError);
  EXPECT_THROW(alpha_of_h(0.5), DomainError);
  EXPECT_THROW(params_of_h(-0.1, Branch::Plus), DomainError);
  EXPECT_THROW(background_roots(0.3), DomainError);
}

TEST(Params, IdentitiesHoldForRandomAlpha) {
  for (const double a : random_alphas(1000, 7)) {
    const SolitonParams p = params_of_alpha(a, Branch::Minus);
    ASSERT_NEAR(p.h, p.psi0 - 2.0 * p.psi0 * p.psi0 * p.psi0, 1e-12 * p.h) << "alpha=" << a;
    ASSERT_NEAR(p.amp_A * p.amp_A + 6.0 * p.psi0 * p.psi0, 1.0, 1e-12) << "alpha=" << a;
    ASSERT_LT(p.psi0 * p.psi0, 1.0 / 6.0);
    ASSERT_GT(p.amp_A, 0.0);
    ASSERT_LT(p.amp_A, 1.0);
  }
}

TEST(Params, RoundTripForRandomAlpha) {
  for (const double a : random_alphas(1000, 11)) {
    const double h = h_of_alpha(a);
    ASSERT_NEAR(h_of_alpha(alpha_of_h(h)), h, 1e-12) << "alpha=" << a;
    ASSERT_NEAR(alpha_of_h(h), a, 1e-12) << "alpha=" << a;
    const SolitonParams q = params_of_h(h, Branch::Plus);
    ASSERT_NEAR(q.alpha, a, 1e-12);
  }
}

TEST(Params, PumpDecreasesInAlpha) {
  std::vector<double> as = random_alphas(1000, 13, 0.01, 20.0);
  std::sort(as.begin(), as.end());
  for (std::size_t i = 1; i < as.size(); ++i) {
    if (as[i] > as[i - 1]) ASSERT_LT(h_of_alpha(as[i]), h_of_alpha(as[i - 1])) << as[i];
  }
}

TEST(BackgroundRoots, FrozenAtAlphaOne) {
  const auto r = background_roots(kH1);
  EXPECT_NEAR(r[0], -0.80677097653880264, 1e-13);
  EXPECT_NEAR(r[1], 0.29457168601541303, 1e-13);
  EXPECT_NEAR(r[2], 0.51219929052338961, 1e-13);
}

TEST(BackgroundRoots, RootsSolveCubicAndMatchPsi0) {
  for (const double a : random_alphas(1000, 17)) {
    const SolitonParams p = params_of_alpha(a, Branch::Minus);
    const auto r = background_roots(p.h);
    ASSERT_LT(r[0], r[1]);
    ASSERT_LT(r[1], r[2]);
    for (const double x : r) ASSERT_LT(std::abs(2.0 * x * x * x - x + p.h), 1e-12);
    ASSERT_NEAR(r[1], p.psi0, 1e-10);
  }
}

TEST(BackgroundRoots, SmallPumpLeadingOrder) {
  for (const double h : {1e-3, 1e-4, 1e-5}) {
    EXPECT_NEAR(background_roots(h)[1], h, 3.0 * h * h * h);
  }
}

TEST(Profile, CenterValues) {
  const SolitonProfile m = make(1.0, Branch::Minus, 2049);
  const SolitonProfile p = make(1.0, Branch::Plus, 2049);
  EXPECT_NEAR(m.u_values[1024], kUMinus0, 1e-14);
  EXPECT_NEAR(p.u_values[1024], kUPlus0, 1e-14);
  EXPECT_NEAR(m.x_values[1024], 0.0, 1e-12);
}

TEST(Profile, StructureAndTails) {
  for (const double a : {0.5, 1.0, 3.0, 6.0}) {
    for (const Branch b : {Branch::Plus, Branch::Minus}) {
      const SolitonProfile pr = make(a, b, 1025);
      const double psi0 = pr.params.psi0;
      const double tail = 10.0 * std::exp(-pr.params.amp_A * pr.grid.half_length);
      EXPECT_NEAR(pr.u_values.front(), psi0, tail);
      EXPECT_NEAR(pr.u_values.back(), psi0, tail);
      for (std::size_t i = 0; i < pr.u_values.size(); ++i) {
        ASSERT_DOUBLE_EQ(pr.u_values[i], psi0 * (1.0 + pr.phi_values[i]));
        if (b == Branch::Plus) {
          ASSERT_GT(pr.phi_values[i], 0.0);
          ASSERT_GT(pr.u_values[i], 0.0);
        } else {
          ASSERT_LT(pr.phi_values[i], 0.0);
        }
      }
      EXPECT_NEAR(pr.grid.spacing * static_cast<double>(pr.grid.n_points - 1), 2.0 * pr.grid.half_length, 1e-12);
    }
  }
}

TEST(Profile, DerivativeMatchesFiniteDifference) {
  const SolitonProfile pr = make(1.5, Branch::Minus, 4097);
  const double dx = pr.grid.spacing;
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < pr.u_values.size(); ++i) {
    const auto& u = pr.u_values;
    const double fd = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * dx);
    worst = std::max(worst, std::abs(fd - pr.u_prime_values[i]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Profile, AlphaDerivativeMatchesFiniteDifference) {
  for (const Branch b : {Branch::Plus, Branch::Minus}) {
    const double a = 2.0;
    const double d = 1e-5;
    const ProfileGrid g = ProfileGrid::full(60.0, 801);
    const SolitonProfile p0 = build_profile(params_of_alpha(a, b), g);
    const SolitonProfile pp = build_profile(params_of_alpha(a + d, b), g);
    const SolitonProfile pm = build_profile(params_of_alpha(a - d, b), g);
    const std::vector<double> du = profile_alpha_derivative(p0);
    for (std::size_t i = 0; i < du.size(); i += 7) {
      ASSERT_NEAR(du[i], (pp.u_values[i] - pm.u_values[i]) / (2.0 * d), 1e-7);
    }
  }
}

TEST(Profile, DomainTooShortNamesMinimum) {
  const SolitonParams p = params_of_alpha(1.0, Branch::Plus);
  try {
    build_profile(p, ProfileGrid::full(20.0, 513));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("half_length must be at least"), std::string::npos);
  }
  EXPECT_NO_THROW(build_profile(p, ProfileGrid::full(min_half_length(p.amp_A), 513)));
  EXPECT_DOUBLE_EQ(default_half_length(0.5), 80.0);
  EXPECT_DOUBLE_EQ(default_half_length(1.0), 40.0);
}

TEST(Residual, ExactProfileAtFineGrid) {
  EXPECT_LT(profile_residual(make(1.0, Branch::Minus, 4096, 50.0)), 1e-5);
  EXPECT_LT(profile_residual(nls_profile(ProfileGrid::full(40.0, 4096))), 1e-5);
}

TEST(Residual, FourthOrderConvergence) {
  for (const double a : {1.0, 2.0, 3.0}) {
    for (const Branch b : {Branch::Plus, Branch::Minus}) {
      const double r1 = profile_residual(make(a, b, 1025));
      const double r2 = profile_residual(make(a, b, 2049));
      const double ratio = r1 / r2;
      EXPECT_GT(ratio, 8.0) << a;
      EXPECT_LT(ratio, 32.0) << a;
    }
  }
}

TEST(Residual, PerturbationIsDetected) {
  SolitonProfile pr = make(1.0, Branch::Minus, 2049);
  for (std::size_t i = 0; i < pr.u_values.size(); ++i) {
    const double x = pr.x_values[i];
    pr.u_values[i] += 0.01 * std::exp(-x * x);
  }
  EXPECT_GT(profile_residual(pr), 1e-3);
}

TEST(Grid, EvenPartAndRestriction) {
  const SolitonProfile full = make(2.0, Branch::Minus, 1025);
  ASSERT_TRUE(full.grid.splits_by_parity());
  const SolitonProfile half = even_restriction(full);
  EXPECT_EQ(half.grid.n_points, 513u);
  EXPECT_EQ(half.grid.parity, Parity::EvenHalf);
  EXPECT_DOUBLE_EQ(half.grid.spacing, full.grid.spacing);
  EXPECT_DOUBLE_EQ(half.x_values.front(), 0.0);
  EXPECT_DOUBLE_EQ(half.u_values[10], full.u_values[512 + 10]);
  // Even-half residual uses the mirror image and matches the full-grid one.
  EXPECT_NEAR(profile_residual(half), profile_residual(full), 1e-12);
  EXPECT_FALSE(ProfileGrid::full(40.0, 1024).splits_by_parity());
  EXPECT_THROW(ProfileGrid::full(40.0, 1024).even_part(), ConfigError);
}

TEST(Grid, NlsProfile) {
  const SolitonProfile s = nls_profile(ProfileGrid::full(40.0, 801), -1.0);
  EXPECT_TRUE(s.is_nls_limit());
  EXPECT_EQ(s.params.branch, Branch::Minus);
  EXPECT_NEAR(s.u_values[400], -1.0, 1e-14);
  EXPECT_EQ(s.phi_values, s.u_values);
}

TEST(Names, ParseAndPrint) {
  EXPECT_EQ(parse_branch("plus"), Branch::Plus);
  EXPECT_EQ(parse_branch("minus"), Branch::Minus);
  EXPECT_THROW(parse_branch("up"), ConfigError);
  EXPECT_EQ(parse_parity("even"), Parity::EvenHalf);
  EXPECT_EQ(to_string(Branch::Minus), "minus");
}
