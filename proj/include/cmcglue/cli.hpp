#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmcglue/config.hpp"

// Command-line front end. Exit codes: 0 success, 1 a verification check
// failed, 2 bad arguments, configuration or infeasible parameters.

namespace cmcglue {

struct Check {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Expected log-log slope of the weighted error against eps.
double expected_error_slope(int n, double delta);

// Least-squares slope of log y against log x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

// Checks behind `verify` for an already parsed configuration.
std::vector<Check> verification_checks(const RunConfig& config);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmcglue
