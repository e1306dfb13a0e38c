#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bbz::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Options {
  std::filesystem::path out_dir = "verify_out";
  std::size_t threads = 0;
  bool include_determinism = true;  // criterion 12 on a reduced pipeline
};

/// Runs the acceptance criteria, writes their data files under out_dir and
/// returns one result per criterion in order.
std::vector<CheckResult> run_all(const Options& options, std::ostream& progress);

/// Reduced pipeline (profile, spectrum, short sweep) run twice and compared byte for byte.
CheckResult check_determinism(const std::filesystem::path& scratch);

/// Byte comparison of two directory trees. On mismatch `first_difference` names the file.
bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::string* first_difference);

std::string format_line(const CheckResult& r);
std::string format_table(const std::vector<CheckResult>& results);

}  // namespace bbz::verify
