#include "tlearn/loss.hpp"

#include "tlearn/errors.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace tlearn {

double log1pexp(double t) {
  if (t > 30.0) return t + std::exp(-t);
  if (t < -30.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

CompletionLoss::CompletionLoss(const Tensor3& y, Mask mask)
    : y_obs_(mask.apply(y)), mask_(std::move(mask)) {
  if (mask_.count() == 0) throw ParameterError("completion loss: mask observes no entries");
  p_ = static_cast<double>(mask_.count()) / static_cast<double>(mask_.size());
}

double CompletionLoss::value(const Tensor3& x) const {
  require_same_dims(x.dims(), y_obs_.dims(), "completion loss");
  auto xs = x.data();
  auto ys = y_obs_.data();
  double sum = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    if (mask_.at(static_cast<Index>(n))) {
      const double r = xs[n] - ys[n];
      sum += r * r;
    }
  }
  return sum / (2.0 * p_);
}

Tensor3 CompletionLoss::gradient(const Tensor3& x) const {
  require_same_dims(x.dims(), y_obs_.dims(), "completion loss");
  Tensor3 g(x.dims());
  auto xs = x.data();
  auto ys = y_obs_.data();
  auto gs = g.data();
  const double scale = 1.0 / p_;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    if (mask_.at(static_cast<Index>(n))) gs[n] = scale * (xs[n] - ys[n]);
  }
  return g;
}

LogisticLoss::LogisticLoss(const std::vector<Tensor3>& samples, std::vector<int> labels)
    : labels_(std::move(labels)) {
  if (samples.empty()) throw ParameterError("logistic loss: at least one sample is required");
  if (samples.size() != labels_.size()) {
    throw DimensionError("logistic loss: " + std::to_string(samples.size()) + " samples but " +
                         std::to_string(labels_.size()) + " labels");
  }
  dims_ = samples.front().dims();
  design_.resize(static_cast<Index>(samples.size()), dims_.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require_same_dims(samples[i].dims(), dims_, "logistic loss samples");
    if (labels_[i] != 0 && labels_[i] != 1) {
      throw ParameterError("logistic loss: labels must be 0 or 1");
    }
    design_.row(static_cast<Index>(i)) = samples[i].vec().transpose();
  }
  sq_norm_sum_ = design_.squaredNorm();
}

Vector LogisticLoss::margins(const Tensor3& x) const {
  require_same_dims(x.dims(), dims_, "logistic loss");
  return design_ * x.vec();
}

double LogisticLoss::value(const Tensor3& x) const {
  const Vector u = margins(x);
  double sum = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    // log(1 + e^u) - u = log(1 + e^-u) keeps the y = 1 term free of cancellation.
    sum += labels_[static_cast<std::size_t>(i)] == 1 ? log1pexp(-u(i)) : log1pexp(u(i));
  }
  return sum / static_cast<double>(u.size());
}

Tensor3 LogisticLoss::gradient(const Tensor3& x) const {
  const Vector u = margins(x);
  Vector r(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    r(i) = sigmoid(u(i)) - labels_[static_cast<std::size_t>(i)];
  }
  Tensor3 g(dims_);
  g.vec().noalias() = design_.transpose() * r / static_cast<double>(u.size());
  return g;
}

double LogisticLoss::lipschitz() const {
  return sq_norm_sum_ / (4.0 * static_cast<double>(design_.rows()));
}

double LogisticLoss::spectral_lipschitz() const {
  // The Hessian is (1/n) D^T diag(s(1 - s)) D with s(1 - s) <= 1/4.
  const Vector sigma = Eigen::BDCSVD<Matrix>(design_).singularValues();
  return sigma(0) * sigma(0) / (4.0 * static_cast<double>(design_.rows()));
}

}  // namespace tlearn
