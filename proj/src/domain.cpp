#include "domain.hpp"

#include <cmath>
#include <vector>

namespace hjbac {

void DomainSpec::validate() const {
  if (dim < 1) throw ConfigError("domain dimension must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("domain radius must be positive");
}

bool DomainSpec::contains(std::span<const double> x) const {
  if (kind == DomainKind::ball) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
    return r2 < radius * radius;
  }
  for (int i = 0; i < dim; ++i) {
    if (!(std::abs(x[i]) < radius)) return false;
  }
  return true;
}

double DomainSpec::eta(std::span<const double> x) const {
  const double R2 = radius * radius;
  if (kind == DomainKind::ball) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
    return R2 - r2;
  }
  double p = 1.0;
  for (int i = 0; i < dim; ++i) p *= R2 - x[i] * x[i];
  return p;
}

namespace {

// Products over all factors but one, robust to zero factors.
void leave_one_out(std::span<const double> f, std::span<double> out) {
  const int d = static_cast<int>(f.size());
  double pre = 1.0;
  for (int i = 0; i < d; ++i) {
    out[i] = pre;
    pre *= f[i];
  }
  double suf = 1.0;
  for (int i = d - 1; i >= 0; --i) {
    out[i] *= suf;
    suf *= f[i];
  }
}

}  // namespace

void DomainSpec::eta_gradient(std::span<const double> x, std::span<double> out) const {
  if (kind == DomainKind::ball) {
    for (int i = 0; i < dim; ++i) out[i] = -2.0 * x[i];
    return;
  }
  const double R2 = radius * radius;
  thread_local std::vector<double> f, loo;
  f.resize(dim);
  loo.resize(dim);
  for (int i = 0; i < dim; ++i) f[i] = R2 - x[i] * x[i];
  leave_one_out(f, loo);
  for (int i = 0; i < dim; ++i) out[i] = -2.0 * x[i] * loo[i];
}

void DomainSpec::eta_hessian_diag(std::span<const double> x, std::span<double> out) const {
  if (kind == DomainKind::ball) {
    for (int i = 0; i < dim; ++i) out[i] = -2.0;
    return;
  }
  const double R2 = radius * radius;
  thread_local std::vector<double> f, loo;
  f.resize(dim);
  loo.resize(dim);
  for (int i = 0; i < dim; ++i) f[i] = R2 - x[i] * x[i];
  leave_one_out(f, loo);
  for (int i = 0; i < dim; ++i) out[i] = -2.0 * loo[i];
}

void DomainSpec::eta_hessian(std::span<const double> x, std::span<double> out) const {
  if (kind == DomainKind::ball) {
    for (int i = 0; i < dim * dim; ++i) out[i] = 0.0;
    for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i) * dim + i] = -2.0;
    return;
  }
  const double R2 = radius * radius;
  thread_local std::vector<double> f, loo;
  f.resize(dim);
  loo.resize(dim);
  for (int i = 0; i < dim; ++i) f[i] = R2 - x[i] * x[i];
  leave_one_out(f, loo);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (i == j) {
        out[static_cast<std::size_t>(i) * dim + i] = -2.0 * loo[i];
        continue;
      }
      // Product over all factors except i and j.
      double pij = 1.0;
      for (int l = 0; l < dim; ++l) {
        if (l != i && l != j) pij *= f[l];
      }
      out[static_cast<std::size_t>(i) * dim + j] = 4.0 * x[i] * x[j] * pij;
    }
  }
}

double DomainSpec::eta_hessian_quad(std::span<const double> x, std::span<const double> a) const {
  if (kind == DomainKind::ball) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * a[i];
    return -2.0 * s;
  }
  thread_local std::vector<double> h;
  h.resize(static_cast<std::size_t>(dim) * dim);
  eta_hessian(x, h);
  double q = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) q += a[i] * h[static_cast<std::size_t>(i) * dim + j] * a[j];
  }
  return q;
}

RowMat sample_interior(const DomainSpec& dom, int count, RngStream& rng) {
  RowMat pts(count, dom.dim);
  if (dom.kind == DomainKind::ball) {
    for (int r = 0; r < count; ++r) {
      double norm2 = 0.0;
      for (int i = 0; i < dom.dim; ++i) {
        const double g = rng.normal();
        pts(r, i) = g;
        norm2 += g * g;
      }
      const double norm = std::sqrt(norm2);
      // U^(1/d) radius; U in [0,1) keeps every point strictly interior.
      const double rad = dom.radius * std::pow(rng.uniform01(), 1.0 / dom.dim);
      const double scale = norm > 0.0 ? rad / norm : 0.0;
      for (int i = 0; i < dom.dim; ++i) pts(r, i) *= scale;
    }
    return pts;
  }
  for (int r = 0; r < count; ++r) {
    for (int i = 0; i < dom.dim; ++i) {
      pts(r, i) = dom.radius * (2.0 * rng.uniform01() - 1.0);
    }
  }
  return pts;
}

RowMat sample_boundary(const DomainSpec& dom, int count, RngStream& rng) {
  RowMat pts(count, dom.dim);
  if (dom.kind == DomainKind::ball) {
    for (int r = 0; r < count; ++r) {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int i = 0; i < dom.dim; ++i) {
          const double g = rng.normal();
          pts(r, i) = g;
          norm2 += g * g;
        }
      } while (norm2 == 0.0);
      const double scale = dom.radius / std::sqrt(norm2);
      for (int i = 0; i < dom.dim; ++i) pts(r, i) *= scale;
    }
    return pts;
  }
  for (int r = 0; r < count; ++r) {
    for (int i = 0; i < dom.dim; ++i) {
      pts(r, i) = dom.radius * (2.0 * rng.uniform01() - 1.0);
    }
    const int face = static_cast<int>(rng.uniform01() * dom.dim) % dom.dim;
    pts(r, face) = rng.uniform01() < 0.5 ? -dom.radius : dom.radius;
  }
  return pts;
}

}  // namespace hjbac
