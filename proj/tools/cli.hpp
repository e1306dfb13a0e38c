#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bbz/continuation.hpp"
#include "bbz/profiles.hpp"

namespace bbz::cli {

enum class CommandKind { Profile, Spectrum, Sweep, Verify };
enum class OutputFormat { Csv, Json };

struct Command {
  CommandKind kind = CommandKind::Spectrum;
  std::optional<double> alpha;
  std::optional<double> h;
  Branch branch = Branch::Minus;
  std::size_t n_points = 2049;
  double half_length = 0.0;  // 0: default policy
  Parity parity = Parity::Full;
  OutputFormat format = OutputFormat::Csv;
  std::filesystem::path out_dir = ".";
  SweepConfig sweep;
};

/// Bad flags or values; exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// --help was given; what() is the help text.
struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unwritable output; exit code 1.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Command parse_args(int argc, const char* const* argv);

/// key=value lines, '#' comments. Unknown keys and malformed values throw UsageError.
SweepConfig load_config(const std::filesystem::path& path, SweepConfig base = {});
void apply_config_text(std::string_view text, SweepConfig& config, const std::string& origin = "config");

/// Writes `content` to out_dir/name, creating out_dir. Throws IoError.
std::filesystem::path write_outputs(const std::filesystem::path& out_dir, const std::string& name,
                                    const std::string& content);

int run(const Command& command, std::ostream& out, std::ostream& err);

/// parse_args + run with the exit-code mapping (0 ok, 1 computation or I/O, 2 usage).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bbz::cli
