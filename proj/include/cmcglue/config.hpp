#pragma once

#include <string>

#include "cmcglue/assembler.hpp"

// Run configuration for the command-line tool: flat key=value text with
// optional [section] headers. Keys under [common] (or before any header)
// always apply; keys under a construction name apply only to that
// construction. `group_file` points to a JSON list of block matrices.

namespace cmcglue {

struct RunConfig {
  AssemblyParams params;
  double delta = -0.5;
  std::string group_file;
  // sweep
  double tau_min = 0.0, tau_max = 0.0;
  int steps = 6;
  // verify
  int oracle_samples = 200;
  double oracle_tol = 1e-5;
  double slope_tol = 0.15;
};

RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// JSON: {"generators": [{"omega1": [[...]], "omega2": [[...]]}, ...]}
std::vector<GroupElement> load_group_file(const std::string& path);

// Closure-compatible tau for 2 alpha + tau = 2 pi m / N.
double closure_tau(double alpha, int N, int m);

}  // namespace cmcglue
