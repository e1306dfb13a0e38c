#include "bbz/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "bbz/errors.hpp"

namespace bbz {

std::string_view to_string(Branch branch) { return branch == Branch::Plus ? "plus" : "minus"; }

std::string_view to_string(Parity parity) { return parity == Parity::Full ? "full" : "even"; }

Branch parse_branch(std::string_view text) {
  if (text == "plus" || text == "Plus" || text == "+") return Branch::Plus;
  if (text == "minus" || text == "Minus" || text == "-") return Branch::Minus;
  throw ConfigError("unknown branch '" + std::string(text) + "' (expected plus|minus)");
}

Parity parse_parity(std::string_view text) {
  if (text == "full") return Parity::Full;
  if (text == "even") return Parity::EvenHalf;
  throw ConfigError("unknown parity '" + std::string(text) + "' (expected full|even)");
}

ProfileGrid ProfileGrid::full(double half_length, std::size_t n_points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw ConfigError("grid half_length must be positive");
  if (n_points < 5) throw ConfigError("grid needs at least 5 points");
  return {half_length, n_points, 2.0 * half_length / static_cast<double>(n_points - 1), Parity::Full};
}

ProfileGrid ProfileGrid::even_half(double half_length, std::size_t n_points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw ConfigError("grid half_length must be positive");
  if (n_points < 5) throw ConfigError("grid needs at least 5 points");
  return {half_length, n_points, half_length / static_cast<double>(n_points - 1), Parity::EvenHalf};
}

double ProfileGrid::x(std::size_t i) const {
  const double offset = parity == Parity::Full ? -half_length : 0.0;
  return offset + static_cast<double>(i) * spacing;
}

std::vector<double> ProfileGrid::points() const {
  std::vector<double> xs(n_points);
  for (std::size_t i = 0; i < n_points; ++i) xs[i] = x(i);
  if (parity == Parity::Full && n_points % 2 == 1) xs[n_points / 2] = 0.0;
  return xs;
}

ProfileGrid ProfileGrid::even_part() const {
  if (!splits_by_parity()) throw ConfigError("only Full grids with an odd point count have an even part");
  return even_half(half_length, (n_points + 1) / 2);
}

double h_of_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
  const double c2 = std::cosh(alpha) * std::cosh(alpha);
  return std::numbers::sqrt2 * c2 / std::pow(1.0 + 2.0 * c2, 1.5);
}

double alpha_of_h(double h) {
  if (!(h > 0.0) || !(h < kMaxPump)) {
    throw DomainError("h must lie in the open interval (0, 2/(3*sqrt(6))) = (0, 0.272165...)");
  }
  // h decreases monotonically in alpha; grow the upper end until it brackets.
  double lo = 0.0;
  double hi = 1.0;
  while (h_of_alpha(hi) > h) {
    lo = hi;
    hi *= 2.0;
    if (hi > 700.0) throw DomainError("h too small to invert without overflow");
  }
  const auto f = [h](double a) { return a <= 0.0 ? kMaxPump - h : h_of_alpha(a) - h; };
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                                          iterations);
  const double root = 0.5 * (a + b);
  if (!(root > 0.0)) throw DomainError("h too close to 2/(3*sqrt(6)) to resolve alpha");
  return root;
}

SolitonParams params_of_alpha(double alpha, Branch branch) {
  SolitonParams p;
  p.alpha = alpha;
  p.h = h_of_alpha(alpha);
  const double c = std::cosh(alpha);
  const double s = std::sinh(alpha);
  const double q = 1.0 + 2.0 * c * c;
  p.psi0 = 1.0 / std::sqrt(2.0 * q);
  p.amp_A = std::numbers::sqrt2 * s / std::sqrt(q);
  p.branch = branch;
  return p;
}

SolitonParams params_of_h(double h, Branch branch) { return params_of_alpha(alpha_of_h(h), branch); }

std::array<double, 3> background_roots(double h) {
  if (!(h > 0.0) || !(h < kMaxPump)) {
    throw DomainError("background_roots needs h in (0, 2/(3*sqrt(6))) for three distinct real roots");
  }
  // psi^3 - psi/2 + h/2 = 0, trigonometric form for three real roots.
  const double p = -0.5;
  const double q = 0.5 * h;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
  std::array<double, 3> roots{};
  for (int k = 0; k < 3; ++k) roots[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = 2.0 * r * r * r - r + h;
      const double df = 6.0 * r * r - 1.0;
      if (df == 0.0) break;
      r -= f / df;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double default_half_length(double amp_A) { return std::max(40.0, 40.0 / amp_A); }

double min_half_length(double amp_A) { return 30.0 / amp_A; }

namespace {

void check_decay(double amp_A, const ProfileGrid& grid) {
  if (grid.half_length * amp_A < 30.0 * (1.0 - 1e-12)) {
    throw ConfigError("domain too short for the decay rate A = " + std::to_string(amp_A) +
                      ": half_length must be at least " + std::to_string(min_half_length(amp_A)));
  }
}

}  // namespace

SolitonProfile build_profile(const SolitonParams& params, const ProfileGrid& grid) {
  if (!(params.alpha > 0.0)) throw DomainError("profile needs alpha > 0");
  check_decay(params.amp_A, grid);

  SolitonProfile prof;
  prof.params = params;
  prof.grid = grid;
  prof.x_values = grid.points();
  const std::size_t n = grid.n_points;
  prof.u_values.resize(n);
  prof.phi_values.resize(n);
  prof.u_prime_values.resize(n);

  const double c = std::cosh(params.alpha);
  const double s = std::sinh(params.alpha);
  const double sign = params.branch == Branch::Plus ? 1.0 : -1.0;
  const double A = params.amp_A;
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = A * prof.x_values[i];
    const double denom = 1.0 + sign * c * std::cosh(ax);
    const double phi = 2.0 * s * s / denom;
    prof.phi_values[i] = phi;
    prof.u_values[i] = params.psi0 * (1.0 + phi);
    prof.u_prime_values[i] = -params.psi0 * 2.0 * s * s * sign * c * A * std::sinh(ax) / (denom * denom);
  }
  return prof;
}

SolitonProfile even_restriction(const SolitonProfile& profile) {
  const ProfileGrid half = profile.grid.even_part();
  const std::size_t offset = profile.grid.n_points / 2;
  SolitonProfile out;
  out.params = profile.params;
  out.grid = half;
  out.x_values = half.points();
  const auto tail = [offset](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(offset), v.end());
  };
  out.u_values = tail(profile.u_values);
  out.phi_values = tail(profile.phi_values);
  out.u_prime_values = tail(profile.u_prime_values);
  return out;
}

SolitonProfile nls_profile(const ProfileGrid& grid, double sign) {
  check_decay(1.0, grid);
  SolitonProfile prof;
  prof.params = SolitonParams{std::numeric_limits<double>::infinity(), 0.0, 0.0, 1.0,
                              sign < 0.0 ? Branch::Minus : Branch::Plus};
  prof.grid = grid;
  prof.x_values = grid.points();
  const std::size_t n = grid.n_points;
  prof.u_values.resize(n);
  prof.u_prime_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = prof.x_values[i];
    const double sech = 1.0 / std::cosh(x);
    prof.u_values[i] = sign * sech;
    prof.u_prime_values[i] = -sign * sech * std::tanh(x);
  }
  prof.phi_values = prof.u_values;
  return prof;
}

std::vector<double> profile_alpha_derivative(const SolitonProfile& profile) {
  const std::size_t n = profile.grid.n_points;
  std::vector<double> du(n, 0.0);
  if (profile.is_nls_limit()) return du;

  const SolitonParams& p = profile.params;
  const double c = std::cosh(p.alpha);
  const double s = std::sinh(p.alpha);
  const double q = 1.0 + 2.0 * c * c;
  const double sign = p.branch == Branch::Plus ? 1.0 : -1.0;
  const double dpsi0 = -4.0 * c * s * p.psi0 * p.psi0 * p.psi0;
  const double dA = 3.0 * std::numbers::sqrt2 * c / std::pow(q, 1.5);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = profile.x_values[i];
    const double ax = p.amp_A * x;
    const double denom = 1.0 + sign * c * std::cosh(ax);
    const double ddenom = sign * (s * std::cosh(ax) + c * std::sinh(ax) * dA * x);
    const double dphi = (4.0 * s * c * denom - 2.0 * s * s * ddenom) / (denom * denom);
    du[i] = dpsi0 * (1.0 + profile.phi_values[i]) + p.psi0 * dphi;
  }
  return du;
}

double profile_residual(const SolitonProfile& profile) {
  const auto& u = profile.u_values;
  const std::size_t n = u.size();
  const double dx2 = profile.grid.spacing * profile.grid.spacing;
  const double h = profile.params.h;
  const bool half = profile.grid.parity == Parity::EvenHalf;
  const auto at = [&](std::ptrdiff_t k) { return u[static_cast<std::size_t>(k < 0 ? -k : k)]; };

  const std::ptrdiff_t first = half ? 0 : 2;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 3;
  double worst = 0.0;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const double upp =
        (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) / (12.0 * dx2);
    const double ui = at(i);
    worst = std::max(worst, std::abs(-upp + ui - 2.0 * ui * ui * ui - h));
  }
  return worst;
}

}  // namespace bbz
