#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <stdexcept>
#include <string>

namespace spord {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Arr = Eigen::ArrayXd;
using SpMat = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

// Malformed user input (files, config, unknown ids). The CLI maps this to exit code 2.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric evaluation that cannot proceed (non-finite state, failed run).
// The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Standard logistic CDF, stable for large |x|.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace spord
