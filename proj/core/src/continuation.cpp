#include "bbz/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "bbz/errors.hpp"
#include "bbz/operators.hpp"

namespace bbz {

using cd = std::complex<double>;

std::string_view to_string(CollisionKind kind) {
  switch (kind) {
    case CollisionKind::EigenvalueCollision:
      return "EigenvalueCollision";
    case CollisionKind::EdgeCollision:
      return "EdgeCollision";
    case CollisionKind::NoneInRange:
      return "NoneInRange";
  }
  return "?";
}

void validate(const SweepConfig& c) {
  if (!(c.alpha_min > 0.0) || !(c.alpha_max >= c.alpha_min) || !std::isfinite(c.alpha_max)) {
    throw ConfigError("alpha range must satisfy 0 < alpha_min <= alpha_max < inf");
  }
  if (c.alpha_min < 0.3 && c.half_length <= 0.0) {
    throw ConfigError("alpha_min below 0.3 needs an explicit half length (the default domain grows like 40/A)");
  }
  if (c.steps == 0 && c.alpha_max != c.alpha_min) throw ConfigError("steps must be at least 1");
  if (c.n_points < 2 * kMinOperatorSize + 1) throw ConfigError("n_points too small");
  if (!(c.collision_tol > 0.0) || !(c.edge_tol > 0.0) || !(c.bisection_tol > 0.0) || !(c.jump_fraction > 0.0)) {
    throw ConfigError("sweep tolerances must be positive");
  }
  if (c.max_halvings < 0) throw ConfigError("max_halvings must be nonnegative");
  if (!(c.quartet_offset > 0.0)) throw ConfigError("quartet_offset must be positive");
}

std::vector<double> sweep_alphas(const SweepConfig& c) {
  std::vector<double> a;
  if (c.steps == 0) return {c.alpha_max};
  const double step = (c.alpha_max - c.alpha_min) / static_cast<double>(c.steps);
  for (std::size_t i = 0; i < c.steps; ++i) a.push_back(c.alpha_max - static_cast<double>(i) * step);
  a.push_back(c.alpha_min);
  return a;
}

SolitonProfile sweep_profile(double alpha, const SweepConfig& c) {
  const SolitonParams p = params_of_alpha(alpha, c.branch);
  const double len = c.half_length > 0.0 ? c.half_length : default_half_length(p.amp_A);
  return build_profile(p, ProfileGrid::full(len, c.n_points | 1u));
}

SpectrumReport sweep_spectrum(double alpha, const SweepConfig& c) {
  return analyze_spectrum(sweep_profile(alpha, c), c.spectrum);
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BBZ_THREADS")) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            // Keep the lowest failing index so the reported error is schedule independent.
            const std::lock_guard lock(mu);
            if (i < failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<const ClassifiedEigenvalue*> gap_candidates(const SpectrumReport& report, int krein,
                                                        bool include_near_edge) {
  std::vector<const ClassifiedEigenvalue*> out;
  for (const ClassifiedEigenvalue& e : report.eigenvalues) {
    const bool cls_ok = e.cls == EigenClass::Imaginary || (include_near_edge && e.cls == EigenClass::NearEdge);
    if (cls_ok && e.lambda.imag() > 0.0 && e.krein == krein) out.push_back(&e);
  }
  std::sort(out.begin(), out.end(),
            [](const ClassifiedEigenvalue* a, const ClassifiedEigenvalue* b) { return a->lambda.imag() < b->lambda.imag(); });
  return out;
}

bool pre_collision(const SpectrumReport& r) {
  return r.counts.kr == 0 && r.counts.kc == 0 && !gap_candidates(r, -1, false).empty();
}

namespace {

const ClassifiedEigenvalue* nearest(const std::vector<const ClassifiedEigenvalue*>& cands, double target) {
  if (cands.empty()) return nullptr;
  if (std::isnan(target)) return cands.front();
  const ClassifiedEigenvalue* best = cands.front();
  for (const ClassifiedEigenvalue* c : cands) {
    if (std::abs(c->lambda.imag() - target) < std::abs(best->lambda.imag() - target)) best = c;
  }
  return best;
}

BranchPoint base_point(const SpectrumReport& r) {
  BranchPoint p;
  p.alpha = r.alpha;
  p.h = r.h;
  p.edge = r.edge;
  p.zero_mult = r.zero_multiplicity;
  p.counts = r.counts;
  p.index_pass = r.index_check.pass;
  p.index_conditional = r.index_check.conditional;
  return p;
}

BranchPoint mu_point(const SpectrumReport& r, double prev_mu) {
  BranchPoint p = base_point(r);
  if (const ClassifiedEigenvalue* e = nearest(gap_candidates(r, -1, true), prev_mu)) {
    p.mu = e->lambda.imag();
    p.krein = -1;
  } else {
    // Quartet member in the first quadrant closest to the previous value.
    const ClassifiedEigenvalue* best = nullptr;
    for (const ClassifiedEigenvalue& e : r.eigenvalues) {
      if (e.cls != EigenClass::Complex || e.lambda.real() <= 0.0 || e.lambda.imag() <= 0.0) continue;
      if (!best || (!std::isnan(prev_mu) &&
                    std::abs(e.lambda.imag() - prev_mu) < std::abs(best->lambda.imag() - prev_mu))) {
        best = &e;
      }
    }
    if (best) {
      p.mu = best->lambda.imag();
      p.post_collision = true;
    } else {
      p.lost = true;
    }
  }
  if (!std::isnan(p.mu)) p.gap_margin = p.edge - p.mu;
  return p;
}

bool tracked(const BranchPoint& p) { return !p.lost && !p.post_collision; }

struct Tracker {
  const SweepConfig& config;
  std::vector<SpectrumReport> reports;
  std::vector<BranchPoint> points;

  bool needs_refinement(const BranchPoint& a, const BranchPoint& b) const {
    if (!tracked(a)) return false;
    if (b.lost) return true;
    return tracked(b) && std::abs(b.mu - a.mu) > config.jump_fraction * b.edge;
  }

  // Inserts midpoints between the last accepted point and `next` while the match jumps.
  void refine(const BranchPoint& a, const SpectrumReport& b_report, int depth) {
    const BranchPoint b = mu_point(b_report, a.mu);
    if (depth >= config.max_halvings || !needs_refinement(a, b)) return;
    SpectrumReport mid = sweep_spectrum(0.5 * (a.alpha + b_report.alpha), config);
    refine(a, mid, depth + 1);
    push(std::move(mid));
    refine(points.back(), b_report, depth + 1);
  }

  void push(SpectrumReport r) {
    const double prev = points.empty() ? kNaN : points.back().mu;
    points.push_back(mu_point(r, prev));
    reports.push_back(std::move(r));
  }
};

}  // namespace

SweepResult sweep(const SweepConfig& config) {
  validate(config);
  const std::vector<double> alphas = sweep_alphas(config);
  std::vector<SpectrumReport> base(alphas.size());
  parallel_for(alphas.size(), resolve_threads(config.threads),
               [&](std::size_t i) { base[i] = sweep_spectrum(alphas[i], config); });

  Tracker t{config, {}, {}};
  for (SpectrumReport& r : base) {
    if (!t.points.empty()) t.refine(t.points.back(), r, 0);
    t.push(std::move(r));
  }

  SweepResult out;
  out.config = config;
  out.mu_branch = std::move(t.points);
  out.reports = std::move(t.reports);

  double prev = kNaN;
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const SpectrumReport& r = out.reports[i];
    const double mu = out.mu_branch[i].mu;
    std::vector<const ClassifiedEigenvalue*> cands;
    for (const ClassifiedEigenvalue* c : gap_candidates(r, +1, true)) {
      if (std::isnan(mu) || c->lambda.imag() > mu) cands.push_back(c);
    }
    const ClassifiedEigenvalue* e = std::isnan(prev) ? (cands.empty() ? nullptr : cands.front()) : nearest(cands, prev);
    if (!e) continue;
    BranchPoint p = base_point(r);
    p.mu = e->lambda.imag();
    p.krein = +1;
    p.gap_margin = p.edge - p.mu;
    out.mu_tilde.push_back(p);
    prev = p.mu;
    if (std::isnan(out.mu_tilde_emergence) && e->cls == EigenClass::Imaginary) out.mu_tilde_emergence = p.alpha;
  }
  return out;
}

CollisionEvent detect_collision(const SweepResult& s) {
  const SweepConfig& c = s.config;
  CollisionEvent ev;

  std::size_t k = s.reports.size();
  bool seen_pre = false;
  for (std::size_t i = 0; i < s.reports.size(); ++i) {
    const bool pre = pre_collision(s.reports[i]);
    if (pre) {
      seen_pre = true;
    } else if (seen_pre) {
      k = i;
      break;
    }
  }

  if (k == s.reports.size()) {
    double sep = kNaN;
    double margin = kNaN;
    for (const BranchPoint& p : s.mu_branch) {
      if (tracked(p)) margin = std::isnan(margin) ? p.gap_margin : std::min(margin, p.gap_margin);
    }
    for (const BranchPoint& q : s.mu_tilde) {
      for (const BranchPoint& p : s.mu_branch) {
        if (p.alpha == q.alpha && tracked(p)) sep = std::isnan(sep) ? q.mu - p.mu : std::min(sep, q.mu - p.mu);
      }
    }
    ev.separation = sep;
    ev.gap_margin = margin;
    return ev;
  }

  double lo = s.reports[k].alpha;
  double hi = s.reports[k - 1].alpha;
  SpectrumReport hi_report = s.reports[k - 1];
  while (hi - lo > c.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    SpectrumReport r = sweep_spectrum(mid, c);
    if (pre_collision(r)) {
      hi = mid;
      hi_report = std::move(r);
    } else {
      lo = mid;
    }
  }
  ev.alpha_lo = lo;
  ev.alpha_hi = hi;
  ev.alpha_star = 0.5 * (lo + hi);
  ev.h_star = h_of_alpha(ev.alpha_star);

  const std::vector<const ClassifiedEigenvalue*> neg = gap_candidates(hi_report, -1, false);
  const double mu = neg.front()->lambda.imag();
  double mu_tilde = kNaN;
  for (const ClassifiedEigenvalue* e : gap_candidates(hi_report, +1, true)) {
    if (e->lambda.imag() > mu) {
      mu_tilde = e->lambda.imag();
      break;
    }
  }
  ev.separation = mu_tilde - mu;
  ev.gap_margin = hi_report.edge - mu;
  if (ev.separation < c.collision_tol) {
    ev.kind = CollisionKind::EigenvalueCollision;
  } else if (ev.gap_margin < c.edge_tol) {
    ev.kind = CollisionKind::EdgeCollision;
  } else {
    // Neither threshold reached at the bisection tolerance: report the closer alternative.
    ev.kind = !(ev.separation / c.collision_tol > ev.gap_margin / c.edge_tol) ? CollisionKind::EigenvalueCollision
                                                                               : CollisionKind::EdgeCollision;
  }

  const double aq = ev.alpha_star - c.quartet_offset;
  if (aq > 0.0) {
    SpectrumReport q = sweep_spectrum(aq, c);
    for (const ClassifiedEigenvalue& e : q.eigenvalues) {
      if (e.cls == EigenClass::Complex) ev.quartet.push_back(e.lambda);
    }
    ev.quartet_report = std::move(q);
  }
  return ev;
}

SmallHResult small_h_mu0(const ProfileGrid& grid) {
  const std::vector<double> x = grid.points();
  const std::size_t n = x.size();
  std::vector<double> u0(n);
  std::vector<double> pot(n);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    u0[i] = -1.0 / std::cosh(x[i]);
    pot[i] = 1.0 - 6.0 * u0[i] * u0[i];
    rhs[i] = 6.0 * u0[i] * u0[i];
  }
  const DiscretizedOperator lp = assemble_schrodinger(grid, pot, natural_bc(grid), OperatorKind::Lplus);

  // w = L+^{-1}[1] = 1 + v with L+ v = 6 u0^2, since L+ 1 = 1 - 6 u0^2 and v decays.
  const std::vector<double> v = solve_samples(lp, rhs);
  std::vector<double> vm_u0(n);
  for (std::size_t i = 0; i < n; ++i) vm_u0[i] = -4.0 * u0[i] * (1.0 + v[i]) * u0[i];
  const std::vector<double> y = solve_samples(lp, u0);

  const std::vector<double> u0c = lp.to_operator_basis(u0);
  SmallHResult res;
  res.numerator = lp.inner(lp.to_operator_basis(vm_u0), u0c);
  res.denominator = lp.inner(lp.to_operator_basis(y), u0c);
  if (!(res.numerator < 0.0)) {
    throw ComputationError("small-h expansion: <V- u0, u0> = " + std::to_string(res.numerator) +
                           " is not negative");
  }
  if (!(res.denominator < 0.0)) {
    throw ComputationError("small-h expansion: <L+^{-1} u0, u0> = " + std::to_string(res.denominator) +
                           " is not negative");
  }
  res.mu0 = std::sqrt(res.numerator / res.denominator);
  return res;
}

const Eigenpair* tracked_eigenpair(const SpectrumReport& report) {
  const Eigenpair* best = nullptr;
  for (const ClassifiedEigenvalue* c : gap_candidates(report, -1, false)) {
    for (const Eigenpair& p : report.point_eigs) {
      if (p.lambda == c->lambda && p.sector == c->sector) return &p;
    }
  }
  return best;
}

SmallHFit small_h_extrapolation(std::span<const double> hs, std::size_t n_points, const SpectrumOptions& options) {
  SmallHFit fit;
  for (const double h : hs) {
    const SolitonParams p = params_of_h(h, Branch::Minus);
    const SolitonProfile prof = build_profile(p, ProfileGrid::full(default_half_length(p.amp_A), n_points));
    const SpectrumReport r = analyze_spectrum(prof, options);
    const std::vector<const ClassifiedEigenvalue*> cands = gap_candidates(r, -1, false);
    if (cands.empty()) throw ComputationError("no negative-Krein gap eigenvalue at h = " + std::to_string(h));
    fit.hs.push_back(h);
    fit.ratios.push_back(cands.front()->lambda.imag() / std::sqrt(h));
  }
  const double m = static_cast<double>(fit.hs.size());
  if (fit.hs.size() < 2) throw ConfigError("extrapolation needs at least two h values");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.hs.size(); ++i) {
    sx += fit.hs[i];
    sy += fit.ratios[i];
    sxx += fit.hs[i] * fit.hs[i];
    sxy += fit.hs[i] * fit.ratios[i];
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

double slope_predictor(const SolitonProfile& profile, const Eigenpair& pair, double resolution) {
  if (!pair.has_vector()) throw ConfigError("slope predictor needs an eigenvector");
  const std::vector<OperatorPair> sectors = sector_operators(profile, true);
  if (pair.sector >= sectors.size()) throw ConfigError("eigenpair sector does not exist for this profile");
  const DiscretizedOperator& op = sectors[pair.sector].lplus;
  const std::size_t n = op.n;
  if (pair.vector.size() != 2 * n) throw ConfigError("eigenvector does not match the profile's sector operators");

  const std::vector<double> du = profile_alpha_derivative(profile);
  const std::size_t offset =
      (sectors.size() == 2 ? profile.grid.n_points / 2 : 0) + op.first_sample;

  const std::span<const cd> z1 = pair.z1();
  const std::span<const cd> z2 = pair.z2();
  std::vector<cd> a(n);
  std::vector<cd> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = profile.u_values[offset + i] * du[offset + i];
    a[i] = -12.0 * g * z1[i];
    b[i] = -4.0 * g * z2[i];
  }
  const double form = (op.inner(a, z1) + op.inner(b, z2)).real();
  const cd zjz = op.inner(z1, z2) - op.inner(z2, z1);
  const double norm = (op.inner(z1, z1) + op.inner(z2, z2)).real();
  if (std::abs(zjz) < resolution * norm) {
    throw ComputationError("collision proximity: <z, Jz> vanishes, the slope formula does not apply");
  }
  return (cd(form) / (cd(0.0, 1.0) * zjz)).real();
}

MonotonicityReport mu_monotonicity_report(std::span<const BranchPoint> branch, double tail_lo, double tail_hi) {
  std::vector<BranchPoint> pts;
  for (const BranchPoint& p : branch) {
    if (tracked(p) && !std::isnan(p.mu)) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end(), [](const BranchPoint& a, const BranchPoint& b) { return a.alpha < b.alpha; });
  MonotonicityReport rep;
  rep.tail_lo = tail_lo;
  rep.tail_hi = tail_hi;
  for (const BranchPoint& p : pts) rep.alphas.push_back(p.alpha);
  bool any_tail = false;
  bool all_neg = true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d = pts[i + 1].mu - pts[i].mu;
    const int sgn = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    rep.signs.push_back(sgn);
    if (pts[i].alpha >= tail_lo && pts[i + 1].alpha <= tail_hi) {
      any_tail = true;
      all_neg = all_neg && sgn < 0;
    }
  }
  rep.tail_decreasing = any_tail && all_neg;
  return rep;
}

}  // namespace bbz
