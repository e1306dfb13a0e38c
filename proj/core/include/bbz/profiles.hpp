#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace bbz {

enum class Branch { Plus, Minus };
enum class Parity { Full, EvenHalf };

std::string_view to_string(Branch branch);
std::string_view to_string(Parity parity);
Branch parse_branch(std::string_view text);
Parity parse_parity(std::string_view text);

/// Upper end of the admissible pump range, 2/(3*sqrt(6)).
inline constexpr double kMaxPump = 0.27216552697590867757747600830065;

/// Parameters of one member of the explicit soliton family.
///
/// `alpha` is the shape parameter, `h` the pump, `psi0` the background level
/// and `amp_A` the exponential decay rate of the localized part. All four are
/// tied together by closed-form maps; use params_of_alpha / params_of_h rather
/// than filling the struct by hand.
struct SolitonParams {
  double alpha = 0.0;
  double h = 0.0;
  double psi0 = 0.0;
  double amp_A = 0.0;
  Branch branch = Branch::Minus;
};

/// Uniform grid. Full grids cover [-L, L]; EvenHalf grids store [0, L] and
/// stand for an even function on the whole line.
struct ProfileGrid {
  double half_length = 0.0;
  std::size_t n_points = 0;
  double spacing = 0.0;
  Parity parity = Parity::Full;

  static ProfileGrid full(double half_length, std::size_t n_points);
  static ProfileGrid even_half(double half_length, std::size_t n_points);

  double x(std::size_t i) const;
  std::vector<double> points() const;

  /// EvenHalf counterpart of a Full grid with an odd point count
  /// (same spacing, the points with x >= 0).
  ProfileGrid even_part() const;
  bool splits_by_parity() const { return parity == Parity::Full && n_points % 2 == 1; }
};

/// Sampled soliton. For the h = 0 limit (see nls_profile) psi0 is zero and
/// phi_values holds u itself.
struct SolitonProfile {
  SolitonParams params;
  ProfileGrid grid;
  std::vector<double> x_values;
  std::vector<double> u_values;
  std::vector<double> phi_values;
  std::vector<double> u_prime_values;

  bool is_nls_limit() const { return params.h == 0.0; }
};

double h_of_alpha(double alpha);
double alpha_of_h(double h);
SolitonParams params_of_alpha(double alpha, Branch branch);
SolitonParams params_of_h(double h, Branch branch);

/// Three real roots of 2 psi^3 - psi + h = 0 in increasing order.
std::array<double, 3> background_roots(double h);

/// Default domain policy L = max(40, 40 / A).
double default_half_length(double amp_A);
/// Smallest L accepted by build_profile, 30 / A.
double min_half_length(double amp_A);

SolitonProfile build_profile(const SolitonParams& params, const ProfileGrid& grid);

/// Same profile restricted to x >= 0 on the EvenHalf grid of a Full grid.
SolitonProfile even_restriction(const SolitonProfile& profile);

/// The h = 0 soliton u = sign * sech(x) of -u'' + u - 2u^3 = 0.
/// sign = -1 is the limit of the minus branch as alpha -> infinity.
SolitonProfile nls_profile(const ProfileGrid& grid, double sign = 1.0);

/// Closed-form d u / d alpha on the profile's grid (zero for the h = 0 limit).
std::vector<double> profile_alpha_derivative(const SolitonProfile& profile);

/// max |-u'' + u - 2u^3 - h| over interior points, u'' from the five-point
/// fourth-order stencil. EvenHalf grids use the mirror image near x = 0.
double profile_residual(const SolitonProfile& profile);

}  // namespace bbz
