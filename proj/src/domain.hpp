#pragma once

#include <span>

#include "common.hpp"
#include "rng.hpp"

namespace hjbac {

enum class DomainKind { ball, box };

/// Open domain with its auxiliary function eta: strictly positive inside,
/// zero on the boundary. Ball uses R^2 - |x|^2, box the per-coordinate
/// product of (R^2 - x_i^2).
struct DomainSpec {
  DomainKind kind = DomainKind::ball;
  int dim = 1;
  double radius = 1.0;

  void validate() const;

  bool contains(std::span<const double> x) const;

  double eta(std::span<const double> x) const;
  void eta_gradient(std::span<const double> x, std::span<double> out) const;
  void eta_hessian_diag(std::span<const double> x, std::span<double> out) const;
  /// a' Hess(eta) a; the box case has off-diagonal terms.
  double eta_hessian_quad(std::span<const double> x, std::span<const double> a) const;
  void eta_hessian(std::span<const double> x, std::span<double> out_dxd) const;
};

/// i.i.d. uniform samples on the open domain, one point per row.
/// Ball: gaussian direction scaled by R*U^(1/d); box: per-coordinate uniform.
RowMat sample_interior(const DomainSpec& dom, int count, RngStream& rng);

/// Uniform samples on the boundary, one point per row. Sphere: normalized
/// gaussian; box: face chosen uniformly (equal areas), then uniform on it.
RowMat sample_boundary(const DomainSpec& dom, int count, RngStream& rng);

}  // namespace hjbac
