// Acceptance suite: runs every criterion, then repeats the whole run into a
// second directory and requires byte-identical outputs for criterion 12.
#include <filesystem>
#include <iostream>
#include <string>

#include "verify.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "bbz_acceptance";
  fs::remove_all(root);
  std::ostream null_progress(nullptr);

  bbz::verify::Options first;
  first.out_dir = root / "run1";
  first.include_determinism = false;
  bbz::verify::Options second = first;
  second.out_dir = root / "run2";

  std::vector<bbz::verify::CheckResult> results = bbz::verify::run_all(first, null_progress);
  bbz::verify::run_all(second, null_progress);

  bbz::verify::CheckResult det;
  det.id = 12;
  det.name = "determinism";
  std::string diff;
  det.pass = bbz::verify::same_tree(first.out_dir, second.out_dir, &diff);
  det.detail = det.pass ? "run1 == run2 (" + first.out_dir.string() + ")" : "first difference: " + diff;
  results.push_back(det);

  bool ok = results.size() == 12;
  for (const auto& r : results) {
    std::cout << bbz::verify::format_line(r) << '\n';
    ok = ok && r.pass;
  }
  std::cout << (ok ? "ALL PASS" : "FAILURES") << '\n';
  return ok ? 0 : 1;
}
