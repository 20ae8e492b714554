#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "common.hpp"

namespace hjbac {

/// A twice-differentiable scalar function of the state with analytic
/// derivatives. Used for the boundary interpolant and for analytic value
/// functions attached to benchmark problems.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
  /// Full Hessian, row-major d*d.
  virtual void hessian(std::span<const double> x, std::span<double> out) const = 0;

  virtual bool is_constant() const { return false; }

  virtual void hessian_diag(std::span<const double> x, std::span<double> out) const {
    const int d = dim();
    thread_local std::vector<double> h;
    h.resize(static_cast<std::size_t>(d) * d);
    hessian(x, h);
    for (int i = 0; i < d; ++i) out[i] = h[static_cast<std::size_t>(i) * d + i];
  }

  /// a' Hess a.
  virtual double hessian_quad(std::span<const double> x, std::span<const double> a) const {
    const int d = dim();
    thread_local std::vector<double> h;
    h.resize(static_cast<std::size_t>(d) * d);
    hessian(x, h);
    double q = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) q += a[i] * h[static_cast<std::size_t>(i) * d + j] * a[j];
    }
    return q;
  }
};

class ConstantField final : public ScalarField {
 public:
  ConstantField(int dim, double c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  double value(std::span<const double>) const override { return c_; }
  void gradient(std::span<const double>, std::span<double> out) const override {
    for (int i = 0; i < dim_; ++i) out[i] = 0.0;
  }
  void hessian(std::span<const double>, std::span<double> out) const override {
    for (int i = 0; i < dim_ * dim_; ++i) out[i] = 0.0;
  }
  void hessian_diag(std::span<const double>, std::span<double> out) const override {
    for (int i = 0; i < dim_; ++i) out[i] = 0.0;
  }
  double hessian_quad(std::span<const double>, std::span<const double>) const override {
    return 0.0;
  }
  bool is_constant() const override { return true; }

 private:
  int dim_;
  double c_;
};

/// Field defined by callbacks; hessian callback fills row-major d*d.
/// Optional diag callback avoids assembling the full Hessian on hot paths.
class CallbackField final : public ScalarField {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;
  using HessFn = std::function<void(std::span<const double>, std::span<double>)>;

  CallbackField(int dim, ValueFn v, GradFn g, HessFn h, GradFn hess_diag = nullptr)
      : dim_(dim), v_(std::move(v)), g_(std::move(g)), h_(std::move(h)),
        hd_(std::move(hess_diag)) {}

  int dim() const override { return dim_; }
  double value(std::span<const double> x) const override { return v_(x); }
  void gradient(std::span<const double> x, std::span<double> out) const override { g_(x, out); }
  void hessian(std::span<const double> x, std::span<double> out) const override { h_(x, out); }
  void hessian_diag(std::span<const double> x, std::span<double> out) const override {
    if (hd_) {
      hd_(x, out);
    } else {
      ScalarField::hessian_diag(x, out);
    }
  }

 private:
  int dim_;
  ValueFn v_;
  GradFn g_;
  HessFn h_;
  GradFn hd_;
};

}  // namespace hjbac
