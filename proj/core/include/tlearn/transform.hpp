#pragma once

#include "tlearn/tensor.hpp"

#include <string_view>

namespace tlearn {

enum class TransformKind { Identity, Dct, DataDriven, Custom };

std::string_view to_string(TransformKind kind);

/// Real orthogonal n3 x n3 matrix acting along mode 3.
///
/// Construction validates orthogonality; an instance is always usable as a
/// transform.
class OrthogonalTransform {
 public:
  OrthogonalTransform(Matrix matrix, TransformKind kind = TransformKind::Custom);

  Index size() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  TransformKind kind() const { return kind_; }

 private:
  Matrix matrix_;
  TransformKind kind_;
};

/// Tolerance used by validate_orthogonal, scaled by sqrt(n3).
inline constexpr double kOrthogonalityTol = 1e-10;

bool validate_orthogonal(const Matrix& u);

OrthogonalTransform identity_transform(Index n3);

/// Orthonormal DCT-II: row k, column m is a_k cos(pi (2m+1) k / (2 n3)).
OrthogonalTransform dct_transform(Index n3);

/// Transposed left singular basis of unfold3(pilot).
///
/// Rows are ordered by descending singular value and each row is signed so
/// that its largest-magnitude entry is nonnegative (first such entry wins on
/// ties). Directions that the pilot does not excite are completed to an
/// orthonormal basis deterministically.
OrthogonalTransform data_driven_transform(const Tensor3& pilot);

}  // namespace tlearn
