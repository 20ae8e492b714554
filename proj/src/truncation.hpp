#pragma once

#include "common.hpp"

namespace hjbac {

enum class TruncationMode { smooth, identity };

/// Smooth clipping family: psi is the identity on [-N^delta, N^delta] and
/// flattens outside with a gaussian-tailed slope, so |psi| <= N^delta +
/// sqrt(pi)/2, |psi'| <= 1 and F = psi * psi' saturates for large residuals.
/// Identity mode disables clipping.
class TruncationFamily {
 public:
  struct Eval {
    double psi;
    double psi_prime;
    double F;  // psi * psi'
  };

  /// delta < 0 picks the default (1 - beta)/5.
  TruncationFamily(int width, double beta, double delta = -1.0,
                   TruncationMode mode = TruncationMode::smooth);

  static TruncationFamily identity();

  Eval operator()(double x) const;

  TruncationMode mode() const { return mode_; }
  double delta() const { return delta_; }
  /// N^delta (the half-width of the exact-identity region).
  double threshold() const { return threshold_; }

 private:
  TruncationFamily() = default;
  TruncationMode mode_ = TruncationMode::identity;
  double delta_ = 0.0;
  double threshold_ = 0.0;
};

}  // namespace hjbac
