#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cmcglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;

enum class ErrorKind {
  argument,
  pole,
  divergence,
  region,
  scale,
  sign,
  solver,
  overlap,
  geometry,
  configuration,
  obstruction,
  unsupported,
  infeasible,
  oracle,
  internal,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can tell configuration problems from numerical ones.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cmcglue
