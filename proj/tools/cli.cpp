#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bbz/errors.hpp"
#include "bbz/io.hpp"
#include "bbz/spectra.hpp"
#include "verify.hpp"

namespace bbz::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError(key + ": '" + v + "' is not a real number");
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError(key + ": '" + v + "' is not a count");
  return out;
}

void set_key(SweepConfig& c, const std::string& key, const std::string& v) {
  if (key == "alpha_min") c.alpha_min = parse_real(key, v);
  else if (key == "alpha_max") c.alpha_max = parse_real(key, v);
  else if (key == "steps") c.steps = parse_count(key, v);
  else if (key == "n_points" || key == "n") c.n_points = parse_count(key, v);
  else if (key == "half_length" || key == "length") c.half_length = parse_real(key, v);
  else if (key == "branch") {
    try {
      c.branch = parse_branch(v);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  else if (key == "zero_tol") c.spectrum.zero_tol = parse_real(key, v);
  else if (key == "zero_tol_lambda") c.spectrum.tol.zero_tol_lambda = parse_real(key, v);
  else if (key == "re_tol") c.spectrum.tol.re_tol = parse_real(key, v);
  else if (key == "edge_margin") c.spectrum.tol.edge_margin = parse_real(key, v);
  else if (key == "residual_tol") c.spectrum.tol.residual_tol = parse_real(key, v);
  else if (key == "krein_resolution") c.spectrum.tol.krein_resolution = parse_real(key, v);
  else if (key == "morse_points") c.spectrum.morse_points = parse_count(key, v);
  else if (key == "collision_tol") c.collision_tol = parse_real(key, v);
  else if (key == "edge_tol") c.edge_tol = parse_real(key, v);
  else if (key == "bisection_tol") c.bisection_tol = parse_real(key, v);
  else if (key == "jump_fraction") c.jump_fraction = parse_real(key, v);
  else if (key == "max_halvings") c.max_halvings = static_cast<int>(parse_count(key, v));
  else if (key == "quartet_offset") c.quartet_offset = parse_real(key, v);
  else if (key == "threads") c.threads = parse_count(key, v);
  else if (key == "out_dir" || key == "out") c.out_dir = v;
  else throw UsageError("unknown config key '" + key + "'");
}

std::string h_range_text() {
  std::ostringstream s;
  s.precision(10);
  s << "(0, 2/(3*sqrt(6))) = (0, " << kMaxPump << ")";
  return s.str();
}

}  // namespace

void apply_config_text(std::string_view text, SweepConfig& config, const std::string& origin) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(origin + ":" + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
    }
    set_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

SweepConfig load_config(const std::filesystem::path& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(buf.str(), base, path.string());
  return base;
}

Command parse_args(int argc, const char* const* argv) {
  CLI::App app{"Spectral stability of pumped NLS solitons", "bbz"};
  app.require_subcommand(1, 1);
  // -h would collide with --h (the pump).
  app.set_help_flag("--help", "print help and exit");

  std::optional<double> alpha, h, length, alpha_min, alpha_max;
  std::optional<std::size_t> n, steps;
  std::optional<std::string> branch, parity, config;
  std::string format = "csv";
  std::optional<std::string> out;

  const auto common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help and exit");
    sub->add_option("--branch", branch, "plus | minus");
    sub->add_option("--n", n, "grid points");
    sub->add_option("--length", length, "half length L of [-L, L]");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out, "output directory");
    sub->add_option("--config", config, "key=value config file");
    sub->add_option("--parity", parity, "full | even")->check(CLI::IsMember({"full", "even"}));
  };
  const auto point = [&](CLI::App* sub) {
    sub->add_option("--alpha", alpha, "shape parameter alpha > 0");
    sub->add_option("--h", h, "pump h in " + h_range_text());
  };

  CLI::App* profile = app.add_subcommand("profile", "write the soliton profile");
  CLI::App* spectrum = app.add_subcommand("spectrum", "spectrum of the linearization at one alpha");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "continuation in alpha and collision detection");
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the acceptance checks");
  for (CLI::App* sub : {profile, spectrum, sweep_cmd, verify_cmd}) common(sub);
  point(profile);
  point(spectrum);
  sweep_cmd->add_option("--alpha-min", alpha_min, "lower end of the alpha range");
  sweep_cmd->add_option("--alpha-max", alpha_max, "upper end of the alpha range");
  sweep_cmd->add_option("--steps", steps, "number of alpha intervals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  Command cmd;
  if (profile->parsed()) cmd.kind = CommandKind::Profile;
  else if (spectrum->parsed()) cmd.kind = CommandKind::Spectrum;
  else if (sweep_cmd->parsed()) cmd.kind = CommandKind::Sweep;
  else cmd.kind = CommandKind::Verify;

  if (config) cmd.sweep = load_config(*config, cmd.sweep);

  if (alpha && h) throw UsageError("--alpha and --h are mutually exclusive; give one, the other is derived");
  if (cmd.kind == CommandKind::Profile || cmd.kind == CommandKind::Spectrum) {
    if (!alpha && !h) throw UsageError("--alpha or --h is required");
  }
  if (alpha && !(std::isfinite(*alpha) && *alpha > 0.0)) throw UsageError("--alpha must be a positive real");
  if (h && !(*h > 0.0 && *h < kMaxPump)) throw UsageError("--h must lie in " + h_range_text());
  cmd.alpha = alpha;
  cmd.h = h;

  if (branch) {
    try {
      cmd.branch = parse_branch(*branch);
    } catch (const ConfigError& e) {
      throw UsageError(std::string("--branch: ") + e.what());
    }
    cmd.sweep.branch = cmd.branch;
  } else {
    cmd.branch = cmd.sweep.branch;
  }
  if (parity) cmd.parity = parse_parity(*parity);
  cmd.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;

  if (n) {
    if (*n < 2 * kMinOperatorSize + 1) throw UsageError("--n must be at least " + std::to_string(2 * kMinOperatorSize + 1));
    cmd.n_points = *n;
    cmd.sweep.n_points = *n;
  }
  if (length) {
    if (!(*length > 0.0)) throw UsageError("--length must be positive");
    cmd.half_length = *length;
    cmd.sweep.half_length = *length;
  } else {
    cmd.half_length = cmd.sweep.half_length;
  }
  if (alpha_min) cmd.sweep.alpha_min = *alpha_min;
  if (alpha_max) cmd.sweep.alpha_max = *alpha_max;
  if (steps) cmd.sweep.steps = *steps;
  if (out) cmd.sweep.out_dir = *out;
  cmd.out_dir = cmd.sweep.out_dir;

  if (cmd.kind == CommandKind::Sweep) {
    try {
      validate(cmd.sweep);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  return cmd;
}

std::filesystem::path write_outputs(const std::filesystem::path& out_dir, const std::string& name,
                                    const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::filesystem::path p = out_dir / name;
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("write to " + p.string() + " failed");
  return p;
}

namespace {

SolitonProfile command_profile(const Command& c) {
  const SolitonParams p = c.alpha ? params_of_alpha(*c.alpha, c.branch) : params_of_h(*c.h, c.branch);
  const double len = c.half_length > 0.0 ? c.half_length : default_half_length(p.amp_A);
  const ProfileGrid grid = c.parity == Parity::Full ? ProfileGrid::full(len, c.n_points)
                                                    : ProfileGrid::even_half(len, c.n_points);
  return build_profile(p, grid);
}

std::string csv_text(const auto& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

int run_profile(const Command& c, std::ostream& out) {
  const SolitonProfile prof = command_profile(c);
  const auto path = c.format == OutputFormat::Json
                        ? write_outputs(c.out_dir, "profile.json", profile_json(prof))
                        : write_outputs(c.out_dir, "profile.csv",
                                        csv_text([&](std::ostream& s) { write_profile_csv(s, prof); }));
  out << "wrote " << path.string() << '\n';
  return 0;
}

int run_spectrum(const Command& c, std::ostream& out) {
  const SolitonProfile prof = command_profile(c);
  SpectrumOptions opt = c.sweep.spectrum;
  const SpectrumReport r = analyze_spectrum(prof, opt);
  const auto path = c.format == OutputFormat::Json
                        ? write_outputs(c.out_dir, "spectrum.json", spectrum_json(r))
                        : write_outputs(c.out_dir, "spectrum.csv",
                                        csv_text([&](std::ostream& s) { write_spectrum_csv(s, r); }));
  out << "alpha=" << r.alpha << " h=" << r.h << " edge=" << r.edge << " kr=" << r.counts.kr
      << " kc=" << r.counts.kc << " ki-=" << r.counts.ki_minus << " index " << r.index_check.lhs << " vs "
      << r.index_check.rhs << (r.index_check.pass ? " (pass" : " (FAIL") << (r.index_check.conditional ? ", conditional)" : ")")
      << '\n';
  out << "wrote " << path.string() << '\n';
  return 0;
}

int run_sweep(const Command& c, std::ostream& out) {
  const SweepResult s = sweep(c.sweep);
  const CollisionEvent ev = detect_collision(s);
  write_outputs(c.out_dir, "branch_mu.csv", csv_text([&](std::ostream& o) { write_branch_csv(o, s.mu_branch); }));
  write_outputs(c.out_dir, "branch_mu_tilde.csv", csv_text([&](std::ostream& o) { write_branch_csv(o, s.mu_tilde); }));
  write_outputs(c.out_dir, "collision.json", collision_json(ev));
  out << s.reports.size() << " spectra; collision " << to_string(ev.kind);
  if (ev.kind != CollisionKind::NoneInRange) out << " at alpha*=" << ev.alpha_star << " h*=" << ev.h_star;
  out << "\nwrote branch_mu.csv, branch_mu_tilde.csv, collision.json to " << c.out_dir.string() << '\n';
  return 0;
}

int run_verify(const Command& c, std::ostream& out) {
  verify::Options opt;
  opt.out_dir = c.out_dir;
  opt.threads = c.sweep.threads;
  const std::vector<verify::CheckResult> results = verify::run_all(opt, out);
  const std::string table = verify::format_table(results);
  write_outputs(c.out_dir, "criteria.txt", table);
  out << table;
  for (const auto& r : results) {
    if (!r.pass) return 1;
  }
  return 0;
}

}  // namespace

int run(const Command& c, std::ostream& out, std::ostream& err) {
  try {
    switch (c.kind) {
      case CommandKind::Profile:
        return run_profile(c, out);
      case CommandKind::Spectrum:
        return run_spectrum(c, out);
      case CommandKind::Sweep:
        return run_sweep(c, out);
      case CommandKind::Verify:
        return run_verify(c, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'bbz --help' for the flag list\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  return run(cmd, out, err);
}

}  // namespace bbz::cli
