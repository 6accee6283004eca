#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plap/nonlinearity.hpp"
#include "plap/numerics.hpp"

namespace plap::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kHypothesis = 2,
  kVerification = 3,
};

struct Numerics {
  double quad_tol = 1e-10;
  int scan_points = 1024;
  int grid = 2048;      // profile sample count M
  int ode_steps = 100000;
};

/// Problem specification read from the --config JSON file.
struct RunConfig {
  double p = 2.0;
  double q = 2.0;
  std::optional<double> lambda;
  NonlinearityParams nonlinearity;
  Numerics numerics;
};

/// Parses the config JSON text. Throws ConfigError on malformed input.
RunConfig parse_config(const std::string& text);

/// Runs one command. args excludes the program name, e.g.
/// {"diagram", "--config", "problem.json", "--n", "8"}. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plap::cli
