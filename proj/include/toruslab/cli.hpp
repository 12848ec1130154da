#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "toruslab/experiments.hpp"

namespace toruslab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Exit codes of run_cli.
enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitUsage = 2 };

/// Thrown for bad user input; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads a flat JSON object with keys among n, l, steps, T, T_prime, trials,
/// seed, c, K, C and merges it over `base`. Throws UsageError on a parse
/// failure, an unknown key (named in the message) or a value of the wrong
/// type.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toruslab
