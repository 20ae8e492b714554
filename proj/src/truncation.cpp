#include "truncation.hpp"

#include <cmath>

namespace hjbac {

namespace {
constexpr double kSqrtPiHalf = 0.88622692545275801365;  // sqrt(pi)/2
}

TruncationFamily::TruncationFamily(int width, double beta, double delta, TruncationMode mode) {
  if (width < 1) throw ConfigError("truncation width must be >= 1");
  if (!(beta > 0.5 && beta < 1.0)) throw ConfigError("beta must lie in (0.5, 1)");
  if (delta < 0.0) delta = (1.0 - beta) / 5.0;
  if (!(delta > 0.0 && delta < (1.0 - beta) / 4.0)) {
    throw ConfigError("truncation delta must lie in (0, (1-beta)/4)");
  }
  mode_ = mode;
  delta_ = delta;
  threshold_ = std::pow(static_cast<double>(width), delta);
}

TruncationFamily TruncationFamily::identity() {
  TruncationFamily fam;
  fam.mode_ = TruncationMode::identity;
  return fam;
}

TruncationFamily::Eval TruncationFamily::operator()(double x) const {
  if (mode_ == TruncationMode::identity) return {x, 1.0, x};
  const double s = threshold_;
  const double ax = std::abs(x);
  if (ax <= s) return {x, 1.0, x};
  // Tail slope exp(-(|x|-s)^2) integrates to (sqrt(pi)/2) erf(|x|-s).
  const double sign = x > 0.0 ? 1.0 : -1.0;
  const double psi = sign * (s + kSqrtPiHalf * std::erf(ax - s));
  const double prime = std::exp(-(ax - s) * (ax - s));
  return {psi, prime, psi * prime};
}

}  // namespace hjbac
