#ifndef TENSORQPT_KERNEL_HPP
#define TENSORQPT_KERNEL_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tensorqpt/errors.hpp"

namespace tensorqpt {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Univariate reproducing kernel on a real interval. Implementations are
/// immutable values; eval is symmetric and the kernel is positive
/// semidefinite on distinct points.
class Kernel {
 public:
  virtual ~Kernel() = default;

  /// K(x, y). Throws InputError when either argument leaves the domain.
  double eval(double x, double y) const;

  virtual std::string id() const = 0;
  const Interval& domain() const { return domain_; }

  /// Anchor point of a rank-one modification, if this kernel carries one.
  virtual std::optional<double> anchor() const { return std::nullopt; }

  /// Gram matrix on pairwise-distinct points. Throws InputError on
  /// duplicates or points outside the domain.
  Eigen::MatrixXd gram(const std::vector<double>& points) const;

  /// Column vector [K(nodes_i, x)]_i.
  Eigen::VectorXd section(double x, const std::vector<double>& nodes) const;

 protected:
  explicit Kernel(Interval d) : domain_(d) {}
  virtual double eval_impl(double x, double y) const = 0;

  Interval domain_;
};

using KernelPtr = std::shared_ptr<const Kernel>;

/// K(x, y) = 1 + min(x, y) on [0, 1].
class SobolevKernel final : public Kernel {
 public:
  SobolevKernel() : Kernel({0.0, 1.0}) {}
  std::string id() const override { return "sobolev-min-plus-one"; }

 protected:
  double eval_impl(double x, double y) const override {
    return 1.0 + std::min(x, y);
  }
};

/// K(x, y) = g(x) g(y); one-dimensional range, used for degenerate cases.
class RankOneKernel final : public Kernel {
 public:
  RankOneKernel(std::function<double(double)> g, std::string id,
                Interval d = {0.0, 1.0})
      : Kernel(d), g_(std::move(g)), id_(std::move(id)) {}
  std::string id() const override { return id_; }
  double g(double x) const { return g_(x); }

 protected:
  double eval_impl(double x, double y) const override { return g_(x) * g_(y); }

 private:
  std::function<double(double)> g_;
  std::string id_;
};

/// Kernel given by an arbitrary evaluation rule; escape hatch for tests.
class CustomKernel final : public Kernel {
 public:
  CustomKernel(std::function<double(double, double)> f, std::string id,
               Interval d = {0.0, 1.0})
      : Kernel(d), f_(std::move(f)), id_(std::move(id)) {}
  std::string id() const override { return id_; }

 protected:
  double eval_impl(double x, double y) const override { return f_(x, y); }

 private:
  std::function<double(double, double)> f_;
  std::string id_;
};

/// Rank-one modification K~(x,y) = K(x,y) - c(x) c(y) / ||c||^2 where the
/// correction c is stored as coefficients over base-kernel sections at the
/// master discretization nodes, so K~ stays evaluable at arbitrary points.
class ModifiedKernel final : public Kernel {
 public:
  ModifiedKernel(KernelPtr base, std::vector<double> nodes,
                 Eigen::VectorXd coefficients, double norm_sq,
                 double anchor_point);

  std::string id() const override { return "modified:" + base_->id(); }
  std::optional<double> anchor() const override { return anchor_; }

  const Kernel& base() const { return *base_; }
  KernelPtr base_ptr() const { return base_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  double norm_sq() const { return norm_sq_; }

  /// Correction c(x) = sum_i coeff_i K_base(x, nodes_i).
  double correction(double x) const;

 protected:
  double eval_impl(double x, double y) const override;

 private:
  KernelPtr base_;
  std::vector<double> nodes_;
  Eigen::VectorXd coeffs_;
  double norm_sq_;
  double anchor_;
};

/// Preset lookup: "sobolev" (alias "sobolev-min-plus-one"), "rank1".
KernelPtr make_preset_kernel(const std::string& id);

std::string kernel_to_json(const Kernel& k);
KernelPtr kernel_from_json(const std::string& text);
void save_kernel(const Kernel& k, const std::string& path);
KernelPtr load_kernel(const std::string& path);

}  // namespace tensorqpt

#endif
