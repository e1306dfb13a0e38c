#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "bbz/continuation.hpp"
#include "bbz/operators.hpp"
#include "bbz/profiles.hpp"
#include "bbz/spectra.hpp"

namespace bbz {

inline constexpr const char* kProfileCsvHeader = "x,u,phi,uprime";
inline constexpr const char* kSpectrumCsvHeader = "re,im,class,krein,residual,sector";
inline constexpr const char* kBranchCsvHeader = "alpha,h,mu,krein,edge,gap_margin,zero_mult,kr,kc,ki_minus,index_pass";

// CSV writers use format_real (17 significant digits). JSON strings end with a newline.
void write_profile_csv(std::ostream& out, const SolitonProfile& profile);
std::string profile_json(const SolitonProfile& profile);

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);
std::string spectrum_json(const SpectrumReport& report);

void write_branch_csv(std::ostream& out, std::span<const BranchPoint> points);
std::string collision_json(const CollisionEvent& event);

std::string inertia_json(const InertiaResult& inertia);

}  // namespace bbz
