#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cyclepart/thermo.hpp"

namespace cyclepart::cli {

enum class Command { phase, alpha, free_energy, minimize, exact_z, converge, sample, scan_long_cycles };
enum class Format { json, csv };

std::string to_string(Command command);
std::optional<Command> parse_command(const std::string& name);

// Environment variable read when --seed is absent.
inline constexpr const char* kSeedEnv = "CYCLEPART_SEED";

struct RunConfig {
  Command command = Command::phase;
  SystemParams params;
  double tol = 1e-10;
  Format format = Format::json;
  std::optional<std::string> output_path;
  std::uint64_t seed = 1;
  int K = 5000;
  std::int64_t steps = 1'000'000;
  std::optional<std::int64_t> burn_in;
  std::int64_t thin = 10;
  std::vector<int> n_list;
  // exact-z: also run the permutation-sum oracle.
  bool oracle = false;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPrecision = 3;

// Executes a resolved config. Data goes to `out` (or output_path), diagnostics
// to `err`. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and runs. `seed_env` stands in for
// the environment variable so callers can test it.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               std::optional<std::string> seed_env);

}  // namespace cyclepart::cli
