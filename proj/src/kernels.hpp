#pragma once

#include <string>

#include "domain.hpp"
#include "net.hpp"

namespace hjbac {

struct KernelEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

/// Monte Carlo estimate of the limiting tangent kernel
///   A(x,y) = E[ s(wx+b) s(wy+b) + c^2 s'(wx+b) s'(wy+b) (x.y + 1) ]
/// over i.i.d. (c, w, b) draws from the initialization law.
KernelEstimate kernel_A_mc(std::span<const double> x, std::span<const double> y,
                           const InitSpec& init, long samples, std::uint64_t seed);

/// B(x,y) = eta(x) eta(y) A(x,y).
double kernel_B_factor(const DomainSpec& dom, std::span<const double> x,
                       std::span<const double> y);

/// Tangent kernel of one finite-width scalar network (unscaled parameters):
///   (1/N) sum_i s_i(x) s_i(y) + c_i^2 s'_i(x) s'_i(y) (x.y + 1).
/// std_error_out, when given, receives the per-neuron sample spread / sqrt(N).
double empirical_ntk(const ShallowNet& net, std::span<const double> x,
                     std::span<const double> y, double* std_error_out = nullptr);

/// Kernel matrices over a fixed set of grid nodes estimated with one shared
/// sample set (symmetric and positive semi-definite by construction).
struct KernelMatrices {
  MatrixXd A;  // nodes x nodes
  MatrixXd B;  // eta-weighted
};

KernelMatrices kernel_matrices(const DomainSpec& dom, const RowMat& nodes, long samples,
                               std::uint64_t seed);

/// kernel_matrices with a small binary disk cache keyed by the domain, the
/// grid nodes, the sample count and the seed. cache_dir empty disables
/// caching.
KernelMatrices kernel_matrices_cached(const DomainSpec& dom, const RowMat& nodes,
                                      long samples, std::uint64_t seed,
                                      const std::string& cache_dir);

}  // namespace hjbac
