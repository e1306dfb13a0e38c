#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bbz/profiles.hpp"
#include "bbz/spectra.hpp"

namespace bbz {

struct SweepConfig {
  Branch branch = Branch::Minus;
  double alpha_min = 2.0;
  double alpha_max = 6.0;
  std::size_t steps = 80;  // intervals; the grid has steps + 1 points
  std::size_t n_points = 1025;
  double half_length = 0.0;  // 0 selects default_half_length(A) per alpha
  SpectrumOptions spectrum;
  double collision_tol = 2e-3;  // |mu~ - mu| below this: eigenvalue collision
  double edge_tol = 2e-3;       // gap margin below this: edge collision
  double bisection_tol = 1e-6;
  double jump_fraction = 0.1;   // of the edge, triggers step halving
  int max_halvings = 4;
  double quartet_offset = 0.01; // quartet reported at alpha* - offset
  std::size_t threads = 0;      // 0: BBZ_THREADS, else hardware concurrency
  std::string out_dir = ".";
};

/// Throws ConfigError for an empty or out-of-domain range.
void validate(const SweepConfig& config);

/// Sweep grid from alpha_max down to alpha_min.
std::vector<double> sweep_alphas(const SweepConfig& config);

/// Profile on the sweep grid (odd point count, L from the config policy).
SolitonProfile sweep_profile(double alpha, const SweepConfig& config);

struct BranchPoint {
  double alpha = kNaN;
  double h = kNaN;
  double mu = kNaN;  // |Im lambda| of the tracked eigenvalue
  int krein = 0;     // 0 after the collision (quartet) or when lost
  double edge = kNaN;
  double gap_margin = kNaN;  // edge - mu
  std::size_t zero_mult = 0;
  IndexCounts counts;
  bool index_pass = false;
  bool index_conditional = false;
  bool lost = false;            // no candidate matched
  bool post_collision = false;  // mu taken from a complex quartet
};

struct SweepResult {
  SweepConfig config;
  std::vector<SpectrumReport> reports;    // in tracking order (alpha decreasing), refinements included
  std::vector<BranchPoint> mu_branch;     // negative-Krein pair, one point per report
  std::vector<BranchPoint> mu_tilde;      // positive-Krein gap pair, points where present
  double mu_tilde_emergence = kNaN;       // largest alpha with mu~ below the near-edge band
};

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers; results are
/// indexed, so the output does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Worker count: explicit value, else BBZ_THREADS, else hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

SpectrumReport sweep_spectrum(double alpha, const SweepConfig& config);

/// Gap eigenvalue candidates: imaginary (or near-edge) pairs with Im > 0 and the given Krein sign.
std::vector<const ClassifiedEigenvalue*> gap_candidates(const SpectrumReport& report, int krein,
                                                        bool include_near_edge);

/// Stable pre-collision state: a negative-Krein gap pair and no unstable eigenvalues.
bool pre_collision(const SpectrumReport& report);

SweepResult sweep(const SweepConfig& config);

enum class CollisionKind { EigenvalueCollision, EdgeCollision, NoneInRange };
std::string_view to_string(CollisionKind kind);

struct CollisionEvent {
  double alpha_star = kNaN;
  double h_star = kNaN;
  CollisionKind kind = CollisionKind::NoneInRange;
  double alpha_lo = kNaN;  // unstable side
  double alpha_hi = kNaN;  // stable side
  double separation = kNaN;  // mu~ - mu at alpha_hi, or the minimum over the sweep if none
  double gap_margin = kNaN;  // edge - mu at alpha_hi, or the minimum over the sweep if none
  std::optional<SpectrumReport> quartet_report;  // spectrum at alpha* - quartet_offset
  std::vector<std::complex<double>> quartet;     // complex eigenvalues seen there
};

/// Brackets the first loss of the pre-collision state along the sweep and bisects it.
CollisionEvent detect_collision(const SweepResult& sweep);

struct SmallHResult {
  double mu0 = kNaN;
  double numerator = kNaN;    // <V- u0, u0>
  double denominator = kNaN;  // <L+^{-1} u0, u0>
};

/// Leading coefficient of mu ~ mu0 sqrt(h) for the minus branch at small h,
/// from the h = 0 operators on `grid` (u0 = -sech). Throws ComputationError
/// unless numerator and denominator are both negative.
SmallHResult small_h_mu0(const ProfileGrid& grid);

struct SmallHFit {
  std::vector<double> hs;
  std::vector<double> ratios;  // mu(h) / sqrt(h)
  double intercept = kNaN;     // least-squares a in ratio ~ a + b h
  double slope = kNaN;
};

/// Gap eigenvalue of the minus branch at each h and the linear-in-h extrapolation of mu/sqrt(h).
SmallHFit small_h_extrapolation(std::span<const double> hs, std::size_t n_points, const SpectrumOptions& options = {});

/// d mu / d alpha of a simple gap eigenpair from the alpha-derivative of L.
/// `pair` must come from the split sectors of `profile` (sector_operators(profile, true)).
/// Throws ComputationError when <z, Jz> is below `resolution` (collision proximity).
double slope_predictor(const SolitonProfile& profile, const Eigenpair& pair, double resolution = 1e-9);

/// Negative-Krein gap eigenpair (Im > 0) of a report, if any.
const Eigenpair* tracked_eigenpair(const SpectrumReport& report);

struct MonotonicityReport {
  std::vector<double> alphas;  // ascending
  std::vector<int> signs;      // sign of d mu / d alpha on each interval
  bool tail_decreasing = false;  // all signs negative for alpha in [tail_lo, tail_hi]
  double tail_lo = 4.0;
  double tail_hi = 8.0;
};

MonotonicityReport mu_monotonicity_report(std::span<const BranchPoint> branch, double tail_lo = 4.0,
                                          double tail_hi = 8.0);

}  // namespace bbz
