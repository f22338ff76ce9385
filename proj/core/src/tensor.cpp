#include "tlearn/tensor.hpp"

#include "tlearn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tlearn {

std::string Dims::str() const {
  return std::to_string(n1) + "x" + std::to_string(n2) + "x" + std::to_string(n3);
}

namespace {

void require_positive(const Dims& dims) {
  if (dims.n1 <= 0 || dims.n2 <= 0 || dims.n3 <= 0) {
    throw DimensionError("tensor dimensions must be positive, got " + dims.str());
  }
}

}  // namespace

Tensor3::Tensor3(Dims dims) : dims_(dims) {
  require_positive(dims_);
  data_.assign(static_cast<std::size_t>(dims_.size()), 0.0);
}

Tensor3::Tensor3(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  require_positive(dims_);
  if (static_cast<Index>(data_.size()) != dims_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match " + dims_.str());
  }
  if (!all_finite()) throw DomainError("tensor data contains non-finite values");
}

Tensor3 Tensor3::constant(Dims dims, double value) {
  Tensor3 t(dims);
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor3::SliceMap Tensor3::slice(Index k) {
  return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2};
}

Tensor3::ConstSliceMap Tensor3::slice(Index k) const {
  return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2};
}

Tensor3::SliceMap Tensor3::tubes_by_column() {
  return {data_.data(), dims_.slice_size(), dims_.n3};
}

Tensor3::ConstSliceMap Tensor3::tubes_by_column() const {
  return {data_.data(), dims_.slice_size(), dims_.n3};
}

bool Tensor3::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_dims(dims_, other.dims_, "tensor addition");
  vec() += other.vec();
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_dims(dims_, other.dims_, "tensor subtraction");
  vec() -= other.vec();
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  vec() *= s;
  return *this;
}

Mask::Mask(Dims dims, bool value) : dims_(dims) {
  require_positive(dims_);
  flags_.assign(static_cast<std::size_t>(dims_.size()), value ? 1 : 0);
  count_ = value ? dims_.size() : 0;
}

Mask::Mask(Dims dims, std::vector<std::uint8_t> flags) : dims_(dims), flags_(std::move(flags)) {
  require_positive(dims_);
  if (static_cast<Index>(flags_.size()) != dims_.size()) {
    throw DimensionError("mask length does not match " + dims_.str());
  }
  for (auto& f : flags_) {
    f = f ? 1 : 0;
    count_ += f;
  }
}

Tensor3 Mask::apply(const Tensor3& x) const {
  require_same_dims(dims_, x.dims(), "mask application");
  Tensor3 out(dims_);
  auto src = x.data();
  auto dst = out.data();
  for (std::size_t n = 0; n < flags_.size(); ++n) {
    if (flags_[n]) dst[n] = src[n];
  }
  return out;
}

void require_same_dims(const Dims& a, const Dims& b, const char* where) {
  if (!(a == b)) {
    throw DimensionError(std::string(where) + ": dimension mismatch " + a.str() + " vs " +
                         b.str());
  }
}

Matrix unfold3(const Tensor3& x) { return x.tubes_by_column().transpose(); }

Tensor3 fold3(const Matrix& m, Dims dims) {
  if (m.rows() != dims.n3 || m.cols() != dims.slice_size()) {
    throw DimensionError("fold3: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(dims.n3) +
                         "x" + std::to_string(dims.slice_size()));
  }
  Tensor3 x(dims);
  x.tubes_by_column() = m.transpose();
  return x;
}

double fro_norm(const Tensor3& x) { return x.vec().norm(); }

double inf_norm(const Tensor3& x) { return x.vec().lpNorm<Eigen::Infinity>(); }

double inner(const Tensor3& x, const Tensor3& y) {
  require_same_dims(x.dims(), y.dims(), "inner");
  return x.vec().dot(y.vec());
}

Tensor3 project_box(const Tensor3& x, double c) {
  if (!(c > 0.0)) throw ParameterError("project_box: bound c must be positive");
  Tensor3 out = x;
  out.vec() = x.vec().cwiseMax(-c).cwiseMin(c);
  return out;
}

}  // namespace tlearn
