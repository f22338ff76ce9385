#pragma once

#include "tlearn/tensor.hpp"

#include <vector>

namespace tlearn {

/// Smooth convex data-fit term f with an L-Lipschitz gradient.
class Loss {
 public:
  virtual ~Loss() = default;

  virtual Dims dims() const = 0;
  virtual double value(const Tensor3& x) const = 0;
  virtual Tensor3 gradient(const Tensor3& x) const = 0;
  virtual double lipschitz() const = 0;
};

/// (1 / 2p) ||P_Omega(x - y)||_F^2 with p = |Omega| / (n1 n2 n3).
class CompletionLoss final : public Loss {
 public:
  /// `y` may hold arbitrary values off the mask; they are discarded.
  CompletionLoss(const Tensor3& y, Mask mask);

  const Tensor3& observed() const { return y_obs_; }
  const Mask& mask() const { return mask_; }
  double sampling_fraction() const { return p_; }

  Dims dims() const override { return y_obs_.dims(); }
  double value(const Tensor3& x) const override;
  Tensor3 gradient(const Tensor3& x) const override;
  /// 1 / p.
  double lipschitz() const override { return 1.0 / p_; }

 private:
  Tensor3 y_obs_;
  Mask mask_;
  double p_;
};

/// (1/n) sum_i [log(1 + exp<Z_i, x>) - y_i <Z_i, x>] with labels in {0, 1}.
class LogisticLoss final : public Loss {
 public:
  LogisticLoss(const std::vector<Tensor3>& samples, std::vector<int> labels);

  Index sample_count() const { return design_.rows(); }
  const std::vector<int>& labels() const { return labels_; }
  /// Row i is sample i flattened in tensor storage order.
  const Matrix& design() const { return design_; }

  /// <Z_i, x> for every sample.
  Vector margins(const Tensor3& x) const;

  Dims dims() const override { return dims_; }
  double value(const Tensor3& x) const override;
  Tensor3 gradient(const Tensor3& x) const override;
  /// (1 / 4n) sum_i ||Z_i||_F^2.
  double lipschitz() const override;
  /// (1 / 4n) sigma_max(design)^2. Also a valid constant, and never larger
  /// than lipschitz(); computed on demand.
  double spectral_lipschitz() const;

 private:
  Dims dims_;
  Matrix design_;
  std::vector<int> labels_;
  double sq_norm_sum_ = 0.0;
};

/// log(1 + exp(t)) without overflow.
double log1pexp(double t);
double sigmoid(double t);

}  // namespace tlearn
