#pragma once

#include "tlearn/tensor.hpp"
#include "tlearn/transform.hpp"

#include <vector>

namespace tlearn {

/// Fold3(U * unfold3(x)): the tensor in the transformed domain.
Tensor3 apply_transform(const Tensor3& x, const OrthogonalTransform& u);
/// Fold3(U^T * unfold3(xhat)).
Tensor3 inverse_transform(const Tensor3& xhat, const OrthogonalTransform& u);

/// U-product: per transformed slice, a_hat(k) * b_hat(k), mapped back.
Tensor3 t_product(const Tensor3& a, const Tensor3& b, const OrthogonalTransform& u);
Tensor3 t_transpose(const Tensor3& x, const OrthogonalTransform& u);

/// Tensor whose transformed slices are all the n x n identity.
Tensor3 identity_tensor(Index n, const OrthogonalTransform& u);

struct TSVDFactors {
  Tensor3 u_tensor;  // n1 x n1 x n3
  std::vector<Vector> sigma;  // per transformed slice, descending, length min(n1, n2)
  Tensor3 v_tensor;  // n2 x n2 x n3
  OrthogonalTransform transform;

  /// The f-diagonal middle factor in the original domain (n1 x n2 x n3).
  Tensor3 sigma_tensor() const;
  /// u_tensor * sigma_tensor * v_tensor^T.
  Tensor3 reconstruct() const;
};

TSVDFactors t_svd(const Tensor3& x, const OrthogonalTransform& u);

/// Singular values of every transformed slice, without factors.
std::vector<Vector> transformed_singular_values(const Tensor3& x, const OrthogonalTransform& u);

double ttnn(const Tensor3& x, const OrthogonalTransform& u);
double spectral_norm_u(const Tensor3& x, const OrthogonalTransform& u);

struct MultiRank {
  std::vector<Index> ranks;
  bool operator==(const MultiRank&) const = default;
};

/// Counts singular values above tol times the largest over the whole tensor.
MultiRank multi_rank(const Tensor3& x, const OrthogonalTransform& u, double tol = 1e-10);

/// Applies `shape` to the singular values of each transformed slice:
/// result = U * diag(shape(sigma)) * V^T per slice, mapped back. Thin SVD.
template <typename SpectralFn>
Tensor3 spectral_map(const Tensor3& x, const OrthogonalTransform& u, SpectralFn&& shape);

}  // namespace tlearn

#include "tlearn/detail/spectral_map.hpp"
