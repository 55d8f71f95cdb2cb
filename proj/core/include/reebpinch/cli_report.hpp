#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reebpinch::cli {

std::string_view version();

enum class Command {
  profile_check,
  profile_build,
  ode_connect,
  ode_probe,
  surface_orbits,
  verify_pinch,
  verify_ellipsoid,
  report
};
std::string_view to_string(Command c);

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;
inline constexpr int kExitNotApplicable = 3;

struct RunConfig {
  Command command = Command::profile_check;
  double R0 = 1.5;
  double A = 0.5;
  double c = 0.8;
  std::optional<std::filesystem::path> surface;  // surface JSON
  std::optional<std::filesystem::path> input;     // report JSON for `report`
  std::vector<double> radii;
  std::optional<std::pair<double, double>> window;
  std::size_t seeds = 96;
  std::optional<double> tol;  // command-specific default when unset
  std::uint64_t rng_seed = 1;
  std::filesystem::path out = ".";
  bool json = false;  // print the main artifact to stdout

  /// Throws std::invalid_argument on bad tolerances, missing inputs or paths
  /// that do not resolve.
  void validate() const;
};

/// Canonical JSON of the logical configuration: the command, its numbers and
/// the parsed content of the input files. Output options are excluded.
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
/// 16 hex digits of config_hash; stem of every artifact file name.
std::string config_tag(const RunConfig& cfg);

/// Parses argv (flags override --config file values). Throws CLI errors as
/// std::invalid_argument with a printable message; help requests return
/// nullopt after printing.
std::optional<RunConfig> parse_args(int argc, const char* const* argv);

/// Executes the command, writes artifacts and the manifest under cfg.out and
/// returns the exit status.
int run(const RunConfig& cfg);

/// parse_args + run with all errors mapped to exit 1.
int main_entry(int argc, const char* const* argv);

}  // namespace reebpinch::cli
