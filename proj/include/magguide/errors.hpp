#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace magguide {

// Parameter or configuration value outside its documented domain.
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation requested at a coordinate-chart pole (e.g. the cot(nu) term of
// the envelope dynamics at sin(nu) = 0).
class singular_coordinate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical routine failed to produce a trustworthy result (non-finite
// matrix entries, eigenvalue residual too large, ...). Carries the offending
// matrix so callers can log or dump it.
class numerical_failure : public std::runtime_error {
 public:
  numerical_failure(const std::string& what, Eigen::Matrix<double, 6, 6> m)
      : std::runtime_error(what), matrix(std::move(m)) {}
  explicit numerical_failure(const std::string& what)
      : std::runtime_error(what), matrix(Eigen::Matrix<double, 6, 6>::Zero()) {}

  Eigen::Matrix<double, 6, 6> matrix;
};

}  // namespace magguide
