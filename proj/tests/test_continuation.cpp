#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bbz/continuation.hpp"
#include "bbz/errors.hpp"

using namespace bbz;

namespace {

SweepConfig small_config(double lo, double hi, std::size_t steps, std::size_t n) {
  SweepConfig c;
  c.alpha_min = lo;
  c.alpha_max = hi;
  c.steps = steps;
  c.n_points = n;
  c.bisection_tol = 1e-4;
  return c;
}

}  // namespace

TEST(SweepGrid, DescendingAndValidated) {
  const std::vector<double> a = sweep_alphas(small_config(2.0, 6.0, 8, 513));
  ASSERT_EQ(a.size(), 9u);
  EXPECT_DOUBLE_EQ(a.front(), 6.0);
  EXPECT_DOUBLE_EQ(a.back(), 2.0);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i], a[i - 1]);

  EXPECT_THROW(validate(small_config(3.0, 2.0, 4, 513)), ConfigError);
  EXPECT_THROW(validate(small_config(0.0, 2.0, 4, 513)), ConfigError);
  EXPECT_THROW(validate(small_config(0.2, 2.0, 4, 513)), ConfigError);
  SweepConfig ok = small_config(0.2, 2.0, 4, 513);
  ok.half_length = 200.0;
  EXPECT_NO_THROW(validate(ok));
  EXPECT_THROW(validate(small_config(1.0, 2.0, 0, 513)), ConfigError);
}

TEST(SweepGrid, ProfileHasOddPointCount) {
  const SolitonProfile p = sweep_profile(3.0, small_config(2.0, 6.0, 4, 1024));
  EXPECT_EQ(p.grid.n_points % 2, 1u);
  EXPECT_TRUE(p.grid.splits_by_parity());
}

TEST(Parallel, IndexedResultsAndLowestFailure) {
  std::vector<int> out(200, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i], static_cast<int>(i * i));
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 17 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 17");
  }
  EXPECT_EQ(resolve_threads(3), 3u);
  EXPECT_GE(resolve_threads(0), 1u);
}

TEST(Sweep, NoCollisionAboveFour) {
  const SweepResult s = sweep(small_config(4.0, 6.0, 4, 1025));
  ASSERT_EQ(s.mu_branch.size(), s.reports.size());
  for (const BranchPoint& p : s.mu_branch) {
    EXPECT_FALSE(p.lost);
    EXPECT_EQ(p.krein, -1);
    EXPECT_GT(p.mu, 0.0);
    EXPECT_LT(p.mu, p.edge);
    EXPECT_NEAR(p.gap_margin, p.edge - p.mu, 1e-15);
    EXPECT_EQ(p.zero_mult, 2u);
    EXPECT_TRUE(p.index_pass);
  }
  const CollisionEvent ev = detect_collision(s);
  EXPECT_EQ(ev.kind, CollisionKind::NoneInRange);
  EXPECT_TRUE(std::isnan(ev.alpha_star));
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepConfig a = small_config(3.0, 5.0, 4, 513);
  a.threads = 1;
  SweepConfig b = a;
  b.threads = 3;
  const SweepResult ra = sweep(a);
  const SweepResult rb = sweep(b);
  ASSERT_EQ(ra.mu_branch.size(), rb.mu_branch.size());
  for (std::size_t i = 0; i < ra.mu_branch.size(); ++i) {
    EXPECT_EQ(ra.mu_branch[i].alpha, rb.mu_branch[i].alpha);
    EXPECT_EQ(ra.mu_branch[i].mu, rb.mu_branch[i].mu);
  }
}

TEST(Sweep, MonotoneTail) {
  const SweepResult s = sweep(small_config(4.0, 8.0, 8, 513));
  const MonotonicityReport m = mu_monotonicity_report(s.mu_branch);
  EXPECT_TRUE(m.tail_decreasing);
  ASSERT_EQ(m.signs.size() + 1, m.alphas.size());
  for (std::size_t i = 1; i < m.alphas.size(); ++i) EXPECT_GT(m.alphas[i], m.alphas[i - 1]);
}

TEST(Monotonicity, SyntheticBranch) {
  std::vector<BranchPoint> pts;
  for (const double a : {8.0, 6.0, 5.0, 4.0, 3.0}) {
    BranchPoint p;
    p.alpha = a;
    p.mu = a == 5.0 ? 0.1 : 1.0 / a;
    pts.push_back(p);
  }
  const MonotonicityReport m = mu_monotonicity_report(pts);
  EXPECT_FALSE(m.tail_decreasing);
  pts[2].mu = 0.2;
  EXPECT_TRUE(mu_monotonicity_report(pts).tail_decreasing);
}

TEST(Collision, BracketedAndBisected) {
  const SweepResult s = sweep(small_config(2.45, 2.75, 6, 1025));
  const CollisionEvent ev = detect_collision(s);
  ASSERT_EQ(ev.kind, CollisionKind::EigenvalueCollision);
  EXPECT_NEAR(ev.alpha_star, 2.5327, 0.01);
  EXPECT_LE(ev.alpha_lo, ev.alpha_star);
  EXPECT_GE(ev.alpha_hi, ev.alpha_star);
  EXPECT_LT(ev.alpha_hi - ev.alpha_lo, 2e-4);
  EXPECT_NEAR(ev.h_star, h_of_alpha(ev.alpha_star), 1e-12);
  ASSERT_TRUE(ev.quartet_report.has_value());
  EXPECT_EQ(ev.quartet_report->counts.kc, 1);
  ASSERT_EQ(ev.quartet.size(), 4u);
  for (const auto& z : ev.quartet) EXPECT_GT(std::abs(z.real()), 1e-6);

  // A finer sweep grid brackets the same event.
  const CollisionEvent fine = detect_collision(sweep(small_config(2.45, 2.75, 12, 1025)));
  EXPECT_NEAR(fine.alpha_star, ev.alpha_star, 2e-4);
}

TEST(Collision, SecondPairEmergesBeforeCollision) {
  const SweepResult s = sweep(small_config(2.5, 2.7, 4, 1025));
  EXPECT_FALSE(s.mu_tilde.empty());
  for (const BranchPoint& p : s.mu_tilde) EXPECT_EQ(p.krein, 1);
  EXPECT_GT(s.mu_tilde_emergence, 2.55);
}

TEST(SmallH, LeadingCoefficient) {
  const SmallHResult r = small_h_mu0(ProfileGrid::full(40.0, 4097));
  EXPECT_NEAR(r.numerator, -std::numbers::pi, 1e-4);
  EXPECT_NEAR(r.denominator, -0.5, 1e-6);
  EXPECT_NEAR(r.mu0, std::sqrt(2.0 * std::numbers::pi), 1e-4);
}

TEST(SmallH, Extrapolation) {
  const std::vector<double> hs = {1e-2, 3e-3, 1e-3};
  const SmallHFit f = small_h_extrapolation(hs, 2049);
  ASSERT_EQ(f.ratios.size(), 3u);
  EXPECT_NEAR(f.intercept, std::sqrt(2.0 * std::numbers::pi), 0.01 * std::sqrt(2.0 * std::numbers::pi));
  EXPECT_GT(f.ratios[0], f.ratios[2]);
}

TEST(Slope, PredictorMatchesFiniteDifference) {
  SweepConfig c = small_config(2.9, 3.1, 2, 1025);
  const double a = 3.0, d = 1e-3;
  const SolitonProfile pr = sweep_profile(a, c);
  const SpectrumReport r = sweep_spectrum(a, c);
  const Eigenpair* pair = tracked_eigenpair(r);
  ASSERT_NE(pair, nullptr);
  const double predicted = slope_predictor(pr, *pair);
  // Same L on all three grids so only alpha moves.
  c.half_length = pr.grid.half_length;
  const SpectrumReport rd = sweep_spectrum(a - d, c);
  const SpectrumReport ru = sweep_spectrum(a + d, c);
  const Eigenpair* pu = tracked_eigenpair(ru);
  const Eigenpair* pd = tracked_eigenpair(rd);
  ASSERT_NE(pu, nullptr);
  ASSERT_NE(pd, nullptr);
  const double fd = (pu->lambda.imag() - pd->lambda.imag()) / (2.0 * d);
  EXPECT_NEAR(predicted, fd, 1e-3 * std::max(1.0, std::abs(fd)));
  EXPECT_LT(predicted, 0.0);
}

TEST(Names, CollisionKind) {
  EXPECT_EQ(to_string(CollisionKind::NoneInRange), "NoneInRange");
}
