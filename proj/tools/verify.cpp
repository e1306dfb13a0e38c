#include "verify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>

#include "bbz/continuation.hpp"
#include "bbz/errors.hpp"
#include "bbz/format.hpp"
#include "bbz/io.hpp"
#include "bbz/operators.hpp"
#include "bbz/profiles.hpp"
#include "bbz/spectra.hpp"
#include "cli.hpp"

namespace bbz::verify {

namespace fs = std::filesystem;

namespace {

constexpr double kAlphaStarRef = 2.5327;
constexpr double kHStarRef = 0.07749;
constexpr std::size_t kSpectrumPoints = 2049;
constexpr std::size_t kFinePoints = 16385;

// Six significant digits for the human-readable table.
std::string num(double v) {
  if (!std::isfinite(v)) return format_real(v);
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string csv(const auto& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

SolitonProfile full_profile(double alpha, Branch branch, std::size_t n, double length_scale = 1.0) {
  const SolitonParams p = params_of_alpha(alpha, branch);
  return build_profile(p, ProfileGrid::full(length_scale * default_half_length(p.amp_A), n));
}

std::string tag(double alpha, Branch b) { return std::string(to_string(b)) + "_a" + num(alpha); }

// Largest |Re lambda| outside the zero cluster.
double max_real_part(const SpectrumReport& r) {
  double m = 0.0;
  for (const ClassifiedEigenvalue& e : r.eigenvalues) {
    if (e.cls != EigenClass::Zero) m = std::max(m, std::abs(e.lambda.real()));
  }
  return m;
}

bool has_eigenvalue_near(const SpectrumReport& r, std::complex<double> z, double tol) {
  return std::any_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                     [&](const ClassifiedEigenvalue& e) { return std::abs(e.lambda - z) < tol; });
}

struct Context {
  const Options& opt;
  std::ostream& progress;
  std::optional<SweepResult> sweep_minus;
  std::optional<CollisionEvent> collision;

  fs::path dir(const std::string& sub) const { return opt.out_dir / sub; }
  void note(int id, const std::string& what) const { progress << "[" << id << "] " << what << std::endl; }
};

// Smallest admissible domain: the residual of the closed-form samples does not see truncation.
SolitonProfile residual_profile(double alpha, Branch branch, std::size_t n) {
  const SolitonParams p = params_of_alpha(alpha, branch);
  return build_profile(p, ProfileGrid::full(std::max(40.0, min_half_length(p.amp_A)), n));
}

CheckResult c1_profile(Context& ctx) {
  CheckResult r{1, "profile_exactness", true, {}};
  ctx.note(1, "profile residuals at n=2048 and n=4096");
  std::ostringstream table;
  table << "alpha,branch,half_length,residual_2048,residual_4096,ratio\n";
  double worst = 0.0;
  double rmin = INFINITY;
  double rmax = 0.0;
  for (const double a : {0.5, 1.0, 2.0, 3.0}) {
    for (const Branch b : {Branch::Minus, Branch::Plus}) {
      const double r2 = profile_residual(residual_profile(a, b, 2048));
      const double r4 = profile_residual(residual_profile(a, b, 4096));
      const double ratio = r2 / r4;
      table << format_real(a) << ',' << to_string(b) << ','
            << format_real(std::max(40.0, min_half_length(params_of_alpha(a, b).amp_A))) << ',' << format_real(r2) << ',' << format_real(r4) << ','
            << format_real(ratio) << '\n';
      worst = std::max(worst, r4);
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
      r.pass = r.pass && r4 < 1e-5 && ratio >= 8.0 && ratio <= 32.0;
    }
  }
  cli::write_outputs(ctx.dir("c01_profile"), "residuals.csv", table.str());
  r.detail = "max residual(4096)=" + num(worst) + ", refinement ratio in [" + num(rmin) + ", " + num(rmax) + "]";
  return r;
}

CheckResult c2_params(Context& ctx) {
  CheckResult r{2, "parameter_identities", true, {}};
  ctx.note(2, "parameter identities over 1000 random alpha");
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(0.3, 8.0);
  double e_h = 0.0, e_a = 0.0, e_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = dist(rng);
    const SolitonParams p = params_of_alpha(a, Branch::Minus);
    e_h = std::max(e_h, std::abs(p.h - (p.psi0 - 2.0 * p.psi0 * p.psi0 * p.psi0)));
    e_a = std::max(e_a, std::abs(p.amp_A * p.amp_A + 6.0 * p.psi0 * p.psi0 - 1.0));
    e_rt = std::max(e_rt, std::abs(alpha_of_h(p.h) - a));
  }
  r.pass = e_h <= 1e-12 && e_a <= 1e-12 && e_rt <= 1e-12;
  r.detail = "max |h-(psi0-2psi0^3)|=" + num(e_h) + ", max |A^2+6psi0^2-1|=" + num(e_a) +
             ", max alpha round-trip error=" + num(e_rt);
  return r;
}

CheckResult c3_morse(Context& ctx) {
  CheckResult r{3, "morse_table", true, {}};
  ctx.note(3, "Morse indices of L+ and L-");
  std::ostringstream table;
  table << "alpha,branch,n_lplus,n_lminus,zero_lplus,smallest_lplus\n";
  double worst_kernel = 0.0;
  for (const double a : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    for (const Branch b : {Branch::Plus, Branch::Minus}) {
      const SolitonProfile prof = full_profile(a, b, kFinePoints);
      const DiscretizedOperator lp = assemble(prof, OperatorKind::Lplus);
      const InertiaResult mp = morse_index(lp);
      const InertiaResult mm = morse_index(assemble(prof, OperatorKind::Lminus));
      const double small = smallest_magnitude_eigenvalue(lp);
      worst_kernel = std::max(worst_kernel, std::abs(small));
      const std::size_t want_minus = b == Branch::Minus ? 1 : 0;
      r.pass = r.pass && mp.n_negative == 1 && mm.n_negative == want_minus && std::abs(small) < 1e-5;
      table << format_real(a) << ',' << to_string(b) << ',' << mp.n_negative << ',' << mm.n_negative << ','
            << mp.n_zero << ',' << format_real(small) << '\n';
    }
  }
  cli::write_outputs(ctx.dir("c03_morse"), "morse.csv", table.str());
  r.detail = "plus (1,0), minus (1,1) expected at 7 alphas; max |L+ kernel eigenvalue|=" + num(worst_kernel);
  return r;
}

CheckResult c4_plus_unstable(Context& ctx) {
  CheckResult r{4, "plus_branch_instability", true, {}};
  std::string detail;
  for (const double a : {1.0, 2.0, 3.0}) {
    ctx.note(4, "spectrum of u+ at alpha=" + num(a));
    const SpectrumReport rep = analyze_spectrum(full_profile(a, Branch::Plus, kSpectrumPoints));
    cli::write_outputs(ctx.dir("c04_plus"), "spectrum_" + tag(a, Branch::Plus) + ".json", spectrum_json(rep));
    int n_unstable = 0;
    bool real_ok = true;
    bool mirror_ok = true;
    double lam = kNaN;
    for (const ClassifiedEigenvalue& e : rep.eigenvalues) {
      if (e.cls == EigenClass::Zero || e.lambda.real() <= 1e-6) continue;
      ++n_unstable;
      lam = e.lambda.real();
      real_ok = real_ok && e.cls == EigenClass::Real && e.residual < 1e-6;
      mirror_ok = mirror_ok && has_eigenvalue_near(rep, -e.lambda, 1e-6);
    }
    const IndexCheck& ic = rep.index_check;
    const bool ok = n_unstable == 1 && real_ok && mirror_ok && rep.counts.kr == 1 && ic.lhs == 1 && ic.rhs == 1 && ic.pass;
    r.pass = r.pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "a=" + num(a) + ": lambda=" + num(lam) + ", index " + std::to_string(ic.lhs) + "=" + std::to_string(ic.rhs);
  }
  r.detail = detail;
  return r;
}

CheckResult c5_minus_stable(Context& ctx) {
  CheckResult r{5, "minus_branch_stable_regime", true, {}};
  std::string detail;
  for (const double a : {3.0, 4.0, 5.0}) {
    ctx.note(5, "spectrum of u- at alpha=" + num(a));
    const SpectrumReport rep = analyze_spectrum(full_profile(a, Branch::Minus, kSpectrumPoints));
    cli::write_outputs(ctx.dir("c05_minus"), "spectrum_" + tag(a, Branch::Minus) + ".json", spectrum_json(rep));
    const auto gap = gap_candidates(rep, -1, false);
    const double re = max_real_part(rep);
    const IndexCheck& ic = rep.index_check;
    const bool ok = re <= 1e-6 && gap.size() == 1 && rep.counts.ki_minus == 1 && rep.counts.kr == 0 &&
                    rep.counts.kc == 0 && rep.zero_multiplicity == 2 && ic.lhs == 2 && ic.rhs == 2 && ic.pass &&
                    rep.d_value > 0.0;
    r.pass = r.pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "a=" + num(a) + ": mu=" + (gap.empty() ? std::string("none") : num(gap.front()->lambda.imag())) +
              ", max|Re|=" + num(re) + ", zero mult " + std::to_string(rep.zero_multiplicity) + ", index " +
              std::to_string(ic.lhs) + "=" + std::to_string(ic.rhs);
  }
  r.detail = detail;
  return r;
}

CheckResult c6_nls(Context& ctx) {
  CheckResult r{6, "nls_limit", true, {}};
  ctx.note(6, "h = 0 limit");
  const SolitonProfile nls = nls_profile(ProfileGrid::full(40.0, kSpectrumPoints), -1.0);
  const SpectrumReport rep = analyze_spectrum(nls);
  cli::write_outputs(ctx.dir("c06_nls"), "spectrum_h0.json", spectrum_json(rep));

  const SolitonProfile fine = nls_profile(ProfileGrid::full(40.0, kFinePoints), -1.0);
  const DiscretizedOperator lp = assemble(fine, OperatorKind::Lplus);
  const std::vector<double> y = solve_samples(lp, fine.u_values);
  const double den = lp.inner(lp.to_operator_basis(y), lp.to_operator_basis(fine.u_values));
  const double d = d_matrix(fine);
  const double onset = rep.essential_cluster_min;
  r.pass = rep.zero_multiplicity == 4 && std::abs(onset - 1.0) <= 0.02 && std::abs(den + 0.5) <= 1e-3 &&
           std::abs(d - 0.5) <= 1e-3;
  r.detail = "zero multiplicity " + std::to_string(rep.zero_multiplicity) + ", essential onset " + num(onset) +
             ", <L+^-1 u0,u0>=" + num(den) + ", <L-^-1 u0',u0'>=" + num(d);
  return r;
}

CheckResult c7_edge(Context& ctx) {
  CheckResult r{7, "essential_edge", true, {}};
  std::ostringstream table;
  table << "alpha,edge,cluster_min_coarse,cluster_min_fine,rel_coarse,rel_fine\n";
  std::string detail;
  for (const double a : {1.0, 2.0, 3.0}) {
    ctx.note(7, "essential cluster at alpha=" + num(a));
    const SpectrumReport coarse = analyze_spectrum(full_profile(a, Branch::Minus, 1025));
    const SpectrumReport fine = analyze_spectrum(full_profile(a, Branch::Minus, 2049, 2.0));
    const double edge = coarse.edge;
    const double rc = std::abs(coarse.essential_cluster_min - edge) / edge;
    const double rf = std::abs(fine.essential_cluster_min - edge) / edge;
    r.pass = r.pass && rf <= 0.02 && rc <= 0.02 && rf < rc;
    table << format_real(a) << ',' << format_real(edge) << ',' << format_real(coarse.essential_cluster_min) << ','
          << format_real(fine.essential_cluster_min) << ',' << format_real(rc) << ',' << format_real(rf) << '\n';
    if (!detail.empty()) detail += "; ";
    detail += "a=" + num(a) + ": rel " + num(rc) + " -> " + num(rf);
  }
  cli::write_outputs(ctx.dir("c07_edge"), "edge.csv", table.str());
  r.detail = detail;
  return r;
}

CheckResult c8_small_h(Context& ctx) {
  CheckResult r{8, "small_h_asymptotics", true, {}};
  ctx.note(8, "small-h expansion and extrapolation");
  const SmallHResult s = small_h_mu0(ProfileGrid::full(40.0, 4097));
  const std::vector<double> hs{1e-2, 3e-3, 1e-3};
  const SmallHFit fit = small_h_extrapolation(hs, kSpectrumPoints);
  const double rel = std::abs(fit.intercept - s.mu0) / s.mu0;
  r.pass = s.numerator < 0.0 && s.denominator < 0.0 && rel <= 0.05;
  std::ostringstream table;
  table << "h,mu_over_sqrt_h\n";
  for (std::size_t i = 0; i < hs.size(); ++i) table << format_real(hs[i]) << ',' << format_real(fit.ratios[i]) << '\n';
  table << "extrapolated," << format_real(fit.intercept) << '\n';
  table << "mu0," << format_real(s.mu0) << '\n';
  table << "numerator," << format_real(s.numerator) << '\n';
  table << "denominator," << format_real(s.denominator) << '\n';
  cli::write_outputs(ctx.dir("c08_small_h"), "small_h.csv", table.str());
  r.detail = "mu0=" + num(s.mu0) + ", extrapolated " + num(fit.intercept) + " (rel " + num(rel) + "), <V-u0,u0>=" +
             num(s.numerator) + ", <L+^-1u0,u0>=" + num(s.denominator);
  return r;
}

CheckResult c9_collision(Context& ctx) {
  CheckResult r{9, "collision", true, {}};
  SweepConfig cfg;
  cfg.threads = ctx.opt.threads;
  ctx.note(9, "sweep of the minus branch, alpha in [" + num(cfg.alpha_min) + ", " + num(cfg.alpha_max) + "]");
  ctx.sweep_minus = sweep(cfg);
  ctx.note(9, "bisection of the collision");
  ctx.collision = detect_collision(*ctx.sweep_minus);
  const SweepResult& s = *ctx.sweep_minus;
  const CollisionEvent& ev = *ctx.collision;
  const fs::path d = ctx.dir("c09_collision");
  cli::write_outputs(d, "branch_mu.csv", csv([&](std::ostream& o) { write_branch_csv(o, s.mu_branch); }));
  cli::write_outputs(d, "branch_mu_tilde.csv", csv([&](std::ostream& o) { write_branch_csv(o, s.mu_tilde); }));
  cli::write_outputs(d, "collision.json", collision_json(ev));

  const double ea = std::abs(ev.alpha_star - kAlphaStarRef) / kAlphaStarRef;
  const double eh = std::abs(ev.h_star - kHStarRef) / kHStarRef;
  bool quartet_ok = false;
  std::string idx = "none";
  if (ev.quartet_report) {
    const SpectrumReport& q = *ev.quartet_report;
    const bool re_nonzero = std::any_of(ev.quartet.begin(), ev.quartet.end(),
                                        [](std::complex<double> z) { return std::abs(z.real()) > 1e-6; });
    quartet_ok = ev.quartet.size() == 4 && re_nonzero && q.counts.kc == 1 && q.counts.kr == 0 &&
                 q.counts.ki_minus == 0 && q.index_check.lhs == 2 && q.index_check.rhs == 2 && q.index_check.pass;
    idx = std::to_string(q.counts.kr) + "+" + std::to_string(2 * q.counts.kc) + "+" +
          std::to_string(2 * q.counts.ki_minus) + "=" + std::to_string(q.index_check.rhs);
  }
  r.pass = ev.kind == CollisionKind::EigenvalueCollision && ea <= 0.02 && eh <= 0.03 && quartet_ok;
  r.detail = std::string(to_string(ev.kind)) + " alpha*=" + num(ev.alpha_star) + " h*=" + num(ev.h_star) +
             ", quartet " + (ev.quartet.empty() ? std::string("none")
                                                : num(std::abs(ev.quartet.front().real())) + " +- " +
                                                      num(std::abs(ev.quartet.front().imag())) + "i") +
             ", index " + idx;
  return r;
}

CheckResult c10_slope(Context& ctx) {
  CheckResult r{10, "slope_predictor", true, {}};
  SweepConfig cfg;
  std::string detail;
  for (const double a : {3.0, 5.0}) {
    ctx.note(10, "slope at alpha=" + num(a));
    const SolitonProfile prof = sweep_profile(a, cfg);
    const SpectrumReport rep = analyze_spectrum(prof, cfg.spectrum);
    const Eigenpair* z = tracked_eigenpair(rep);
    const SpectrumReport rp = sweep_spectrum(a + 0.01, cfg);
    const SpectrumReport rm = sweep_spectrum(a - 0.01, cfg);
    const Eigenpair* zp = tracked_eigenpair(rp);
    const Eigenpair* zm = tracked_eigenpair(rm);
    if (!z || !zp || !zm) {
      r.pass = false;
      detail += "a=" + num(a) + ": gap eigenpair missing; ";
      continue;
    }
    const double pred = slope_predictor(prof, *z);
    const double fd = (zp->lambda.imag() - zm->lambda.imag()) / 0.02;
    const double rel = std::abs(pred - fd) / std::abs(fd);
    r.pass = r.pass && rel <= 0.05;
    if (!detail.empty()) detail += "; ";
    detail += "a=" + num(a) + ": r=" + num(pred) + ", finite difference " + num(fd) + " (rel " + num(rel) + ")";
  }
  r.detail = detail;
  return r;
}

CheckResult c11_signs(Context& ctx) {
  CheckResult r{11, "sign_claims", true, {}};
  ctx.note(11, "D, <L- phi, phi> and the phi identity along the sweep grid");
  const SweepConfig cfg;
  std::ostringstream table;
  table << "alpha,d_minus,d_plus,lminus_form,phi_identity_residual\n";
  double d_min = INFINITY;
  double form_max = -INFINITY;
  double phi_max = 0.0;
  for (const double a : sweep_alphas(cfg)) {
    const SolitonProfile pm = full_profile(a, Branch::Minus, kFinePoints);
    const SolitonProfile pp = full_profile(a, Branch::Plus, kFinePoints);
    const double dm = d_matrix(pm);
    const double dp = d_matrix(pp);
    const double form = lminus_quadratic_form(pm);
    const double phi = phi_identity_residual(full_profile(a, Branch::Minus, 4097));
    d_min = std::min({d_min, dm, dp});
    form_max = std::max(form_max, form);
    phi_max = std::max(phi_max, phi);
    table << format_real(a) << ',' << format_real(dm) << ',' << format_real(dp) << ',' << format_real(form) << ','
          << format_real(phi) << '\n';
  }
  // D as reported by the sweep spectra themselves.
  if (ctx.sweep_minus) {
    for (const SpectrumReport& rep : ctx.sweep_minus->reports) d_min = std::min(d_min, rep.d_value);
  }
  cli::write_outputs(ctx.dir("c11_signs"), "signs.csv", table.str());
  r.pass = d_min > 0.0 && form_max < 0.0 && phi_max < 1e-4;
  r.detail = "min D=" + num(d_min) + ", max <L- phi,phi>=" + num(form_max) + ", max phi identity residual=" +
             num(phi_max);
  return r;
}

void mini_pipeline(const fs::path& dir) {
  const SolitonProfile prof = full_profile(1.0, Branch::Plus, 513);
  cli::write_outputs(dir, "profile.csv", csv([&](std::ostream& o) { write_profile_csv(o, prof); }));
  cli::write_outputs(dir, "profile.json", profile_json(prof));
  const SpectrumReport rep = analyze_spectrum(full_profile(3.0, Branch::Minus, 513));
  cli::write_outputs(dir, "spectrum.csv", csv([&](std::ostream& o) { write_spectrum_csv(o, rep); }));
  cli::write_outputs(dir, "spectrum.json", spectrum_json(rep));
  SweepConfig cfg;
  cfg.alpha_min = 3.0;
  cfg.alpha_max = 4.0;
  cfg.steps = 4;
  cfg.n_points = 513;
  const SweepResult s = sweep(cfg);
  cli::write_outputs(dir, "branch_mu.csv", csv([&](std::ostream& o) { write_branch_csv(o, s.mu_branch); }));
  cli::write_outputs(dir, "collision.json", collision_json(detect_collision(s)));
}

}  // namespace

bool same_tree(const fs::path& a, const fs::path& b, std::string* first_difference) {
  const auto listing = [](const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const std::vector<fs::path> fa = listing(a);
  const std::vector<fs::path> fb = listing(b);
  if (fa != fb) {
    if (first_difference) *first_difference = "file lists differ";
    return false;
  }
  for (const fs::path& rel : fa) {
    if (slurp(a / rel) != slurp(b / rel)) {
      if (first_difference) *first_difference = rel.string();
      return false;
    }
  }
  return true;
}

CheckResult check_determinism(const fs::path& scratch) {
  CheckResult r{12, "determinism", false, {}};
  const fs::path one = scratch / "run1";
  const fs::path two = scratch / "run2";
  fs::remove_all(one);
  fs::remove_all(two);
  mini_pipeline(one);
  mini_pipeline(two);
  std::string diff;
  r.pass = same_tree(one, two, &diff);
  std::size_t count = 0;
  for (const auto& e : fs::recursive_directory_iterator(one)) count += e.is_regular_file() ? 1 : 0;
  r.detail = r.pass ? std::to_string(count) + " output files byte-identical across two runs" : "differs: " + diff;
  return r;
}

std::vector<CheckResult> run_all(const Options& opt, std::ostream& progress) {
  Context ctx{opt, progress, std::nullopt, std::nullopt};
  using Fn = CheckResult (*)(Context&);
  const std::vector<std::pair<int, Fn>> checks{
      {1, c1_profile},   {2, c2_params},       {3, c3_morse},     {4, c4_plus_unstable},
      {5, c5_minus_stable}, {6, c6_nls},       {7, c7_edge},      {8, c8_small_h},
      {9, c9_collision}, {10, c10_slope},      {11, c11_signs},
  };
  const std::vector<std::string> names{"",
                                       "profile_exactness",
                                       "parameter_identities",
                                       "morse_table",
                                       "plus_branch_instability",
                                       "minus_branch_stable_regime",
                                       "nls_limit",
                                       "essential_edge",
                                       "small_h_asymptotics",
                                       "collision",
                                       "slope_predictor",
                                       "sign_claims"};
  std::vector<CheckResult> out;
  for (const auto& [id, fn] : checks) {
    try {
      out.push_back(fn(ctx));
    } catch (const std::exception& e) {
      out.push_back({id, names[static_cast<std::size_t>(id)], false, std::string("error: ") + e.what()});
    }
  }
  if (opt.include_determinism) {
    ctx.note(12, "reduced pipeline twice");
    try {
      out.push_back(check_determinism(opt.out_dir / "c12_determinism"));
    } catch (const std::exception& e) {
      out.push_back({12, "determinism", false, std::string("error: ") + e.what()});
    }
  }
  return out;
}

std::string format_line(const CheckResult& r) {
  std::string id = std::to_string(r.id);
  if (id.size() < 2) id.insert(0, " ");
  return std::string(r.pass ? "PASS" : "FAIL") + "  " + id + "  " + r.name + "  " + r.detail + "\n";
}

std::string format_table(const std::vector<CheckResult>& results) {
  std::string s;
  std::size_t passed = 0;
  for (const CheckResult& r : results) {
    s += format_line(r);
    passed += r.pass ? 1 : 0;
  }
  s += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
  return s;
}

}  // namespace bbz::verify
