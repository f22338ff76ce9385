#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tlearn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Dims {
  Index n1 = 0;
  Index n2 = 0;
  Index n3 = 0;

  Index size() const { return n1 * n2 * n3; }
  Index slice_size() const { return n1 * n2; }
  bool operator==(const Dims&) const = default;

  std::string str() const;
};

/// Dense real third-order tensor.
///
/// Entry (i, j, k) lives at offset i + j*n1 + k*n1*n2, so frontal slice k is a
/// contiguous column-major n1 x n2 block. Every constructor rejects
/// non-positive dimensions; the ones that take external data also reject
/// non-finite values. The default constructor is the one exception.
class Tensor3 {
 public:
  using SliceMap = Eigen::Map<Matrix>;
  using ConstSliceMap = Eigen::Map<const Matrix>;

  /// Empty placeholder (all dimensions zero); only useful as an assignment target.
  Tensor3() = default;
  /// Zero tensor.
  explicit Tensor3(Dims dims);
  Tensor3(Index n1, Index n2, Index n3) : Tensor3(Dims{n1, n2, n3}) {}
  Tensor3(Dims dims, std::vector<double> data);

  static Tensor3 zeros(Dims dims) { return Tensor3(dims); }
  static Tensor3 constant(Dims dims, double value);

  const Dims& dims() const { return dims_; }
  Index n1() const { return dims_.n1; }
  Index n2() const { return dims_.n2; }
  Index n3() const { return dims_.n3; }
  Index size() const { return dims_.size(); }

  double& operator()(Index i, Index j, Index k) {
    return data_[static_cast<std::size_t>(i + j * dims_.n1 + k * dims_.slice_size())];
  }
  double operator()(Index i, Index j, Index k) const {
    return data_[static_cast<std::size_t>(i + j * dims_.n1 + k * dims_.slice_size())];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  SliceMap slice(Index k);
  ConstSliceMap slice(Index k) const;

  /// (n1*n2) x n3 view whose column k is frontal slice k flattened.
  SliceMap tubes_by_column();
  ConstSliceMap tubes_by_column() const;

  Eigen::Map<Vector> vec() { return {data_.data(), size()}; }
  Eigen::Map<const Vector> vec() const { return {data_.data(), size()}; }

  bool all_finite() const;

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double s);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
  friend Tensor3 operator-(Tensor3 a) { return a *= -1.0; }

  bool operator==(const Tensor3&) const = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Boolean tensor used as an observation index set.
class Mask {
 public:
  explicit Mask(Dims dims, bool value = false);
  Mask(Dims dims, std::vector<std::uint8_t> flags);

  const Dims& dims() const { return dims_; }
  Index size() const { return dims_.size(); }
  Index count() const { return count_; }

  bool operator()(Index i, Index j, Index k) const {
    return flags_[static_cast<std::size_t>(i + j * dims_.n1 + k * dims_.slice_size())] != 0;
  }
  bool at(Index linear) const { return flags_[static_cast<std::size_t>(linear)] != 0; }
  std::span<const std::uint8_t> flags() const { return flags_; }

  /// Entries outside the mask set to zero.
  Tensor3 apply(const Tensor3& x) const;

  bool operator==(const Mask&) const = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> flags_;
  Index count_ = 0;
};

void require_same_dims(const Dims& a, const Dims& b, const char* where);

/// Mode-3 unfolding: n3 x (n1*n2), row k is slice k with i fastest.
Matrix unfold3(const Tensor3& x);
Tensor3 fold3(const Matrix& m, Dims dims);

double fro_norm(const Tensor3& x);
double inf_norm(const Tensor3& x);
double inner(const Tensor3& x, const Tensor3& y);

/// Entrywise clamp to [-c, c].
Tensor3 project_box(const Tensor3& x, double c);

}  // namespace tlearn
