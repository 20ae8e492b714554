#pragma once

#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <string>

namespace hjbac {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration or arguments.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numeric evaluation produced a non-finite value.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File or serialization failure.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Row-major matrices are used for per-point data so that a point (one row)
// can be handed to coefficient callbacks as a contiguous span.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const VectorXd> as_vec(std::span<const double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

}  // namespace hjbac
