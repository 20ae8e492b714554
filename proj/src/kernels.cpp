#include "kernels.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "rng.hpp"

namespace hjbac {

KernelEstimate kernel_A_mc(std::span<const double> x, std::span<const double> y,
                           const InitSpec& init, long samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("kernel estimate needs samples >= 1");
  (void)init;  // single supported law: c ~ U[-1,1], w ~ N(0,I), b ~ U[-1,1]
  const int d = static_cast<int>(x.size());
  double xy1 = 1.0;
  for (int i = 0; i < d; ++i) xy1 += x[i] * y[i];
  RngStream rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    const double c = rng.uniform(-1.0, 1.0);
    double tx = 0.0, ty = 0.0;
    for (int i = 0; i < d; ++i) {
      const double w = rng.normal();
      tx += w * x[i];
      ty += w * y[i];
    }
    const double b = rng.uniform(-1.0, 1.0);
    const double sx = std::tanh(tx + b), sy = std::tanh(ty + b);
    const double spx = 1.0 - sx * sx, spy = 1.0 - sy * sy;
    const double term = sx * sy + c * c * spx * spy * xy1;
    sum += term;
    sum_sq += term * term;
  }
  KernelEstimate est;
  est.samples = samples;
  est.mean = sum / samples;
  if (samples > 1) {
    const double var = (sum_sq - sum * sum / samples) / (samples - 1);
    est.std_error = std::sqrt(std::max(var, 0.0) / samples);
  }
  return est;
}

double kernel_B_factor(const DomainSpec& dom, std::span<const double> x,
                       std::span<const double> y) {
  return dom.eta(x) * dom.eta(y);
}

double empirical_ntk(const ShallowNet& net, std::span<const double> x,
                     std::span<const double> y, double* std_error_out) {
  if (net.output_dim() != 1) throw ConfigError("empirical_ntk requires a scalar network");
  const int N = net.width();
  const int d = net.input_dim();
  double xy1 = 1.0;
  for (int i = 0; i < d; ++i) xy1 += x[i] * y[i];
  const auto inner = net.inner();
  const auto outer = net.outer();
  const auto bias = net.bias();
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < N; ++i) {
    double tx = bias(i), ty = bias(i);
    for (int j = 0; j < d; ++j) {
      tx += inner(i, j) * x[j];
      ty += inner(i, j) * y[j];
    }
    const double sx = std::tanh(tx), sy = std::tanh(ty);
    const double c = outer(0, i);
    const double term = sx * sy + c * c * (1.0 - sx * sx) * (1.0 - sy * sy) * xy1;
    sum += term;
    sum_sq += term * term;
  }
  if (std_error_out) {
    if (N > 1) {
      const double var = (sum_sq - sum * sum / N) / (N - 1);
      *std_error_out = std::sqrt(std::max(var, 0.0) / N);
    } else {
      *std_error_out = 0.0;
    }
  }
  return sum / N;
}

KernelMatrices kernel_matrices(const DomainSpec& dom, const RowMat& nodes, long samples,
                               std::uint64_t seed) {
  if (samples < 1) throw ConfigError("kernel matrices need samples >= 1");
  const Eigen::Index n = nodes.rows();
  const int d = dom.dim;
  RngStream rng(seed);

  MatrixXd sig_sum = MatrixXd::Zero(n, n);
  MatrixXd dsig_sum = MatrixXd::Zero(n, n);

  constexpr long kBlock = 8192;
  MatrixXd sig, dsig;
  VectorXd t(n);
  for (long done = 0; done < samples;) {
    const long m = std::min(kBlock, samples - done);
    sig.resize(m, n);
    dsig.resize(m, n);
    for (long s = 0; s < m; ++s) {
      const double c = rng.uniform(-1.0, 1.0);
      thread_local std::vector<double> w;
      w.resize(d);
      for (int j = 0; j < d; ++j) w[j] = rng.normal();
      const double b = rng.uniform(-1.0, 1.0);
      for (Eigen::Index g = 0; g < n; ++g) {
        double tv = b;
        for (int j = 0; j < d; ++j) tv += w[j] * nodes(g, j);
        const double sv = std::tanh(tv);
        sig(s, g) = sv;
        dsig(s, g) = c * (1.0 - sv * sv);  // |c| folded; c^2 appears in the product
      }
    }
    sig_sum.noalias() += sig.transpose() * sig;
    dsig_sum.noalias() += dsig.transpose() * dsig;
    done += m;
  }

  KernelMatrices km;
  MatrixXd dots = nodes * nodes.transpose();
  dots.array() += 1.0;
  km.A = (sig_sum + dsig_sum.cwiseProduct(dots)) / static_cast<double>(samples);
  VectorXd etas(n);
  for (Eigen::Index g = 0; g < n; ++g) {
    etas(g) = dom.eta({nodes.data() + g * d, static_cast<std::size_t>(d)});
  }
  km.B = etas.asDiagonal() * km.A * etas.asDiagonal();
  return km;
}

namespace {

std::uint64_t grid_fingerprint(const DomainSpec& dom, const RowMat& nodes, long samples,
                               std::uint64_t seed) {
  std::uint64_t h = derive_seed(seed, static_cast<std::uint64_t>(dom.kind) + 1,
                                static_cast<std::uint64_t>(dom.dim),
                                static_cast<std::uint64_t>(samples));
  auto mix = [&h](std::uint64_t v) { h = derive_seed(h, v); };
  std::uint64_t bits;
  std::memcpy(&bits, &dom.radius, sizeof(bits));
  mix(bits);
  mix(static_cast<std::uint64_t>(nodes.rows()));
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    std::memcpy(&bits, nodes.data() + i, sizeof(bits));
    mix(bits);
  }
  return h;
}

constexpr std::uint32_t kCacheMagic = 0x484a4231;  // "HJB1"

}  // namespace

KernelMatrices kernel_matrices_cached(const DomainSpec& dom, const RowMat& nodes,
                                      long samples, std::uint64_t seed,
                                      const std::string& cache_dir) {
  if (cache_dir.empty()) return kernel_matrices(dom, nodes, samples, seed);
  const std::uint64_t key = grid_fingerprint(dom, nodes, samples, seed);
  char name[64];
  std::snprintf(name, sizeof(name), "kernel_%016llx.bin",
                static_cast<unsigned long long>(key));
  const std::filesystem::path path = std::filesystem::path(cache_dir) / name;
  const Eigen::Index n = nodes.rows();
  if (std::ifstream in(path, std::ios::binary); in) {
    std::uint32_t magic = 0;
    std::int64_t rows = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    if (magic == kCacheMagic && rows == n) {
      KernelMatrices km;
      km.A.resize(n, n);
      km.B.resize(n, n);
      in.read(reinterpret_cast<char*>(km.A.data()),
              static_cast<std::streamsize>(sizeof(double)) * n * n);
      in.read(reinterpret_cast<char*>(km.B.data()),
              static_cast<std::streamsize>(sizeof(double)) * n * n);
      if (in) return km;
    }
  }
  const KernelMatrices km = kernel_matrices(dom, nodes, samples, seed);
  std::filesystem::create_directories(cache_dir);
  std::ofstream out(path, std::ios::binary);
  if (out) {
    const std::int64_t rows = n;
    out.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof(kCacheMagic));
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(km.A.data()),
              static_cast<std::streamsize>(sizeof(double)) * n * n);
    out.write(reinterpret_cast<const char*>(km.B.data()),
              static_cast<std::streamsize>(sizeof(double)) * n * n);
  }
  return km;
}

}  // namespace hjbac
