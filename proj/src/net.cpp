#include "net.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace hjbac {

namespace {

void check_shape(int width, int input_dim, int output_dim, double beta) {
  if (width < 1 || input_dim < 1 || output_dim < 1) {
    throw ConfigError("network dimensions must be >= 1");
  }
  if (!(beta > 0.5 && beta < 1.0)) {
    throw ConfigError("beta must lie strictly inside (0.5, 1)");
  }
}

}  // namespace

ShallowNet::ShallowNet(int width, int input_dim, int output_dim, double beta)
    : width_(width), input_dim_(input_dim), output_dim_(output_dim), beta_(beta) {
  check_shape(width, input_dim, output_dim, beta);
  scale_ = std::pow(static_cast<double>(width), -beta);
  params_ = VectorXd::Zero(static_cast<Eigen::Index>(output_dim) * width +
                           static_cast<Eigen::Index>(width) * input_dim + width);
}

ShallowNet ShallowNet::init(int width, int input_dim, int output_dim, double beta,
                            const InitSpec& spec) {
  ShallowNet net(width, input_dim, output_dim, beta);
  net.init_seed_ = spec.seed;
  RngStream rng(spec.seed);
  auto outer = net.outer();
  auto inner = net.inner();
  auto bias = net.bias();
  // Draw order is per neuron (outer column, inner row, bias) and is part of
  // the reproducibility contract.
  for (int i = 0; i < width; ++i) {
    for (int l = 0; l < output_dim; ++l) outer(l, i) = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < input_dim; ++j) inner(i, j) = rng.normal();
    bias(i) = rng.uniform(-1.0, 1.0);
  }
  return net;
}

Eigen::Map<MatrixXd> ShallowNet::outer() {
  return {params_.data(), output_dim_, width_};
}
Eigen::Map<const MatrixXd> ShallowNet::outer() const {
  return {params_.data(), output_dim_, width_};
}
Eigen::Map<MatrixXd> ShallowNet::inner() {
  return {params_.data() + static_cast<Eigen::Index>(output_dim_) * width_, width_, input_dim_};
}
Eigen::Map<const MatrixXd> ShallowNet::inner() const {
  return {params_.data() + static_cast<Eigen::Index>(output_dim_) * width_, width_, input_dim_};
}
Eigen::Map<VectorXd> ShallowNet::bias() {
  return {params_.data() + static_cast<Eigen::Index>(output_dim_) * width_ +
              static_cast<Eigen::Index>(width_) * input_dim_,
          width_};
}
Eigen::Map<const VectorXd> ShallowNet::bias() const {
  return {params_.data() + static_cast<Eigen::Index>(output_dim_) * width_ +
              static_cast<Eigen::Index>(width_) * input_dim_,
          width_};
}

void ShallowNet::forward(std::span<const double> x, std::span<double> out) const {
  thread_local VectorXd act;
  act.noalias() = inner() * as_vec(x) + bias();
  act = act.array().tanh().matrix();
  Eigen::Map<VectorXd> o(out.data(), output_dim_);
  o.noalias() = scale_ * (outer() * act);
}

VectorXd ShallowNet::forward(std::span<const double> x) const {
  VectorXd out(output_dim_);
  forward(x, {out.data(), static_cast<std::size_t>(output_dim_)});
  return out;
}

double ShallowNet::forward1(std::span<const double> x) const {
  double out = 0.0;
  forward(x, {&out, 1});
  return out;
}

VectorXd actor_param_gradient_accumulate(const ShallowNet& net, const RowMat& points,
                                         const RowMat& weights) {
  const int N = net.width(), d = net.input_dim(), k = net.output_dim();
  const double s = net.output_scale();
  const auto outer = net.outer();
  const auto inner = net.inner();
  const auto bias = net.bias();

  VectorXd delta = VectorXd::Zero(net.param_count());
  Eigen::Map<MatrixXd> d_outer(delta.data(), k, N);
  Eigen::Map<MatrixXd> d_inner(delta.data() + static_cast<Eigen::Index>(k) * N, N, d);
  Eigen::Map<VectorXd> d_bias(delta.data() + static_cast<Eigen::Index>(k) * N +
                                  static_cast<Eigen::Index>(N) * d,
                              N);

  VectorXd t(N);
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    const auto x = points.row(j);
    const auto w = weights.row(j);
    t.noalias() = inner * x.transpose() + bias;
    for (int i = 0; i < N; ++i) {
      const double sig = std::tanh(t(i));
      const double sig_p = 1.0 - sig * sig;
      double wh = 0.0;  // sum_l w_l * outer(l, i)
      for (int l = 0; l < k; ++l) {
        d_outer(l, i) += s * w(l) * sig;
        wh += w(l) * outer(l, i);
      }
      const double r = s * wh * sig_p;
      d_inner.row(i) += r * x;
      d_bias(i) += r;
    }
  }
  return delta;
}

NetPointEval net_point_eval(const ShallowNet& net, std::span<const double> x) {
  if (net.output_dim() != 1) throw ConfigError("net_point_eval requires output_dim == 1");
  NetPointEval ev;
  ev.net = &net;
  ev.scale = net.output_scale();
  VectorXd t = net.inner() * as_vec(x) + net.bias();
  ev.act = t.array().tanh().matrix();
  const VectorXd outer_row = net.outer().row(0).transpose();
  ev.c_act_prime = (outer_row.array() * (1.0 - ev.act.array().square())).matrix();
  ev.c_act_dd = (-2.0 * ev.act.array() * ev.c_act_prime.array()).matrix();
  ev.value = ev.scale * outer_row.dot(ev.act);
  ev.grad = ev.scale * (net.inner().transpose() * ev.c_act_prime);
  return ev;
}

double NetPointEval::hess_quad(std::span<const double> a) const {
  const VectorXd wa = net->inner() * as_vec(a);
  return scale * (c_act_dd.array() * wa.array().square()).sum();
}

double NetPointEval::grad_dot(std::span<const double> a) const {
  return grad.dot(as_vec(a));
}

void NetPointEval::hess_diag(std::span<double> out) const {
  const auto inner = net->inner();
  Eigen::Map<VectorXd> o(out.data(), inner.cols());
  o.noalias() = scale * (inner.array().square().matrix().transpose() * c_act_dd);
}

void NetPointEval::hessian(std::span<double> out_dxd) const {
  const auto inner = net->inner();
  const int d = static_cast<int>(inner.cols());
  Eigen::Map<MatrixXd> H(out_dxd.data(), d, d);
  H.noalias() = scale * (inner.transpose() * c_act_dd.asDiagonal() * inner);
}

void save_net(const ShallowNet& net, const std::string& path) {
  nlohmann::json j;
  j["format"] = "hjbac-net";
  j["version"] = 1;
  j["activation"] = "tanh";
  j["beta"] = net.beta();
  j["width"] = net.width();
  j["input_dim"] = net.input_dim();
  j["output_dim"] = net.output_dim();
  j["seed"] = net.init_seed();
  const auto outer = net.outer();
  const auto inner = net.inner();
  const auto bias = net.bias();
  nlohmann::json jo = nlohmann::json::array();
  for (int l = 0; l < net.output_dim(); ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < net.width(); ++i) row.push_back(outer(l, i));
    jo.push_back(std::move(row));
  }
  j["outer"] = std::move(jo);
  nlohmann::json ji = nlohmann::json::array();
  for (int i = 0; i < net.width(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < net.input_dim(); ++c) row.push_back(inner(i, c));
    ji.push_back(std::move(row));
  }
  j["inner"] = std::move(ji);
  nlohmann::json jb = nlohmann::json::array();
  for (int i = 0; i < net.width(); ++i) jb.push_back(bias(i));
  j["bias"] = std::move(jb);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

ShallowNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed checkpoint " + path + ": " + e.what());
  }
  if (j.value("format", "") != "hjbac-net") throw IoError("not a network checkpoint: " + path);
  if (j.value("version", 0) != 1) throw IoError("unsupported checkpoint version in " + path);
  if (j.value("activation", "") != "tanh") throw IoError("unsupported activation in " + path);
  const int N = j.at("width").get<int>();
  const int d = j.at("input_dim").get<int>();
  const int k = j.at("output_dim").get<int>();
  ShallowNet net(N, d, k, j.at("beta").get<double>());
  const auto& jo = j.at("outer");
  const auto& ji = j.at("inner");
  const auto& jb = j.at("bias");
  if (static_cast<int>(jo.size()) != k || static_cast<int>(ji.size()) != N ||
      static_cast<int>(jb.size()) != N) {
    throw IoError("checkpoint dimensions are inconsistent: " + path);
  }
  auto outer = net.outer();
  auto inner = net.inner();
  auto bias = net.bias();
  for (int l = 0; l < k; ++l) {
    for (int i = 0; i < N; ++i) outer(l, i) = jo[l][i].get<double>();
  }
  for (int i = 0; i < N; ++i) {
    for (int c = 0; c < d; ++c) inner(i, c) = ji[i][c].get<double>();
  }
  for (int i = 0; i < N; ++i) bias(i) = jb[i].get<double>();
  net.set_init_seed(j.value("seed", std::uint64_t{0}));
  if (!net.finite()) throw IoError("checkpoint contains non-finite parameters: " + path);
  return net;
}

}  // namespace hjbac
