#include "tlearn/transform.hpp"

#include "tlearn/errors.hpp"

#include <cmath>
#include <numbers>

namespace tlearn {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity:
      return "identity";
    case TransformKind::Dct:
      return "dct";
    case TransformKind::DataDriven:
      return "data";
    case TransformKind::Custom:
      return "custom";
  }
  return "custom";
}

OrthogonalTransform::OrthogonalTransform(Matrix matrix, TransformKind kind)
    : matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw DimensionError("transform matrix must be square and nonempty");
  }
  if (!validate_orthogonal(matrix_)) {
    throw ParameterError("transform matrix is not orthogonal");
  }
}

bool validate_orthogonal(const Matrix& u) {
  if (u.rows() == 0 || u.rows() != u.cols()) return false;
  if (!u.allFinite()) return false;
  const Index n = u.rows();
  const Matrix eye = Matrix::Identity(n, n);
  const double tol = kOrthogonalityTol * std::sqrt(static_cast<double>(n));
  return (u * u.transpose() - eye).norm() <= tol && (u.transpose() * u - eye).norm() <= tol;
}

OrthogonalTransform identity_transform(Index n3) {
  if (n3 < 1) throw DimensionError("identity_transform: n3 must be at least 1");
  return {Matrix::Identity(n3, n3), TransformKind::Identity};
}

OrthogonalTransform dct_transform(Index n3) {
  if (n3 < 1) throw DimensionError("dct_transform: n3 must be at least 1");
  const double n = static_cast<double>(n3);
  Matrix u(n3, n3);
  for (Index k = 0; k < n3; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (Index m = 0; m < n3; ++m) {
      u(k, m) = alpha * std::cos(std::numbers::pi * (2.0 * m + 1.0) * k / (2.0 * n));
    }
  }
  return {std::move(u), TransformKind::Dct};
}

OrthogonalTransform data_driven_transform(const Tensor3& pilot) {
  if (fro_norm(pilot) == 0.0) {
    throw DegenerateInputError("data_driven_transform: pilot tensor is zero");
  }
  const Matrix unfolded = unfold3(pilot);
  Eigen::BDCSVD<Matrix> svd(unfolded, Eigen::ComputeFullU);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("data_driven_transform: SVD of the mode-3 unfolding failed");
  }
  Matrix rows = svd.matrixU().transpose();
  for (Index r = 0; r < rows.rows(); ++r) {
    Index arg = 0;
    rows.row(r).cwiseAbs().maxCoeff(&arg);
    if (rows(r, arg) < 0.0) rows.row(r) *= -1.0;
  }
  return {std::move(rows), TransformKind::DataDriven};
}

}  // namespace tlearn
