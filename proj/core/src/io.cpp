#include "bbz/io.hpp"

#include <ostream>

#include "bbz/format.hpp"
#include "json.hpp"

namespace bbz {

using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

void write_profile_csv(std::ostream& out, const SolitonProfile& p) {
  out << kProfileCsvHeader << '\n';
  for (std::size_t i = 0; i < p.x_values.size(); ++i) {
    out << format_real(p.x_values[i]) << ',' << format_real(p.u_values[i]) << ',' << format_real(p.phi_values[i])
        << ',' << format_real(p.u_prime_values[i]) << '\n';
  }
}

std::string profile_json(const SolitonProfile& p) {
  json data = json::array();
  for (std::size_t i = 0; i < p.x_values.size(); ++i) {
    data.push_back({{"x", p.x_values[i]}, {"u", p.u_values[i]}, {"phi", p.phi_values[i]}, {"uprime", p.u_prime_values[i]}});
  }
  const json j = {
      {"params",
       {{"alpha", p.params.alpha},
        {"h", p.params.h},
        {"psi0", p.params.psi0},
        {"A", p.params.amp_A},
        {"branch", to_string(p.params.branch)}}},
      {"grid", {{"L", p.grid.half_length}, {"n", p.grid.n_points}, {"parity", to_string(p.grid.parity)}}},
      {"data", std::move(data)},
  };
  return dump(j);
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& r) {
  out << kSpectrumCsvHeader << '\n';
  for (const ClassifiedEigenvalue& e : r.eigenvalues) {
    out << format_real(e.lambda.real()) << ',' << format_real(e.lambda.imag()) << ',' << to_string(e.cls) << ','
        << e.krein << ',' << format_real(e.residual) << ',' << e.sector << '\n';
  }
}

std::string spectrum_json(const SpectrumReport& r) {
  json eigs = json::array();
  for (const ClassifiedEigenvalue& e : r.eigenvalues) {
    eigs.push_back({{"re", e.lambda.real()},
                    {"im", e.lambda.imag()},
                    {"krein", e.krein},
                    {"residual", e.residual},
                    {"class", to_string(e.cls)},
                    {"sector", e.sector}});
  }
  const auto morse = [](const InertiaResult& m) {
    return json{{"negative", m.n_negative}, {"zero", m.n_zero}, {"positive", m.n_positive}};
  };
  const json j = {
      {"alpha", r.alpha},
      {"h", r.h},
      {"branch", to_string(r.branch)},
      {"edge", r.edge},
      {"essential_cluster_min", r.essential_cluster_min},
      {"zero_multiplicity", r.zero_multiplicity},
      {"counts", {{"kr", r.counts.kr}, {"kc", r.counts.kc}, {"ki_minus", r.counts.ki_minus}}},
      {"near_edge", r.near_edge},
      {"unresolved", r.unresolved},
      {"morse", {{"lplus", morse(r.morse_plus)}, {"lminus", morse(r.morse_minus)}}},
      {"d_matrix", r.d_value},
      {"index_check",
       {{"lhs", r.index_check.lhs},
        {"rhs", r.index_check.rhs},
        {"pass", r.index_check.pass},
        {"conditional", r.index_check.conditional}}},
      {"eigenvalues", std::move(eigs)},
  };
  return dump(j);
}

void write_branch_csv(std::ostream& out, std::span<const BranchPoint> points) {
  out << kBranchCsvHeader << '\n';
  for (const BranchPoint& p : points) {
    out << format_real(p.alpha) << ',' << format_real(p.h) << ',' << format_real(p.mu) << ',' << p.krein << ','
        << format_real(p.edge) << ',' << format_real(p.gap_margin) << ',' << p.zero_mult << ',' << p.counts.kr << ','
        << p.counts.kc << ',' << p.counts.ki_minus << ',' << (p.index_pass ? 1 : 0) << '\n';
  }
}

std::string collision_json(const CollisionEvent& ev) {
  json quartet = json::array();
  for (const auto& z : ev.quartet) quartet.push_back(complex_json(z));
  json j = {
      {"alpha_star", ev.alpha_star},
      {"h_star", ev.h_star},
      {"kind", to_string(ev.kind)},
      {"bracket", json::array({ev.alpha_lo, ev.alpha_hi})},
      {"separation", ev.separation},
      {"gap_margin", ev.gap_margin},
      {"quartet", std::move(quartet)},
  };
  if (ev.quartet_report) {
    const SpectrumReport& q = *ev.quartet_report;
    j["quartet_alpha"] = q.alpha;
    j["quartet_index_check"] = {{"kr", q.counts.kr},
                                {"kc", q.counts.kc},
                                {"ki_minus", q.counts.ki_minus},
                                {"lhs", q.index_check.lhs},
                                {"rhs", q.index_check.rhs},
                                {"pass", q.index_check.pass}};
  }
  return dump(j);
}

std::string inertia_json(const InertiaResult& m) {
  return dump({{"negative", m.n_negative}, {"zero", m.n_zero}, {"positive", m.n_positive}, {"zero_tol", m.zero_tol}});
}

}  // namespace bbz
