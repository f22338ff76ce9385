#pragma once

// Included from tsvd.hpp.

namespace tlearn {
namespace detail {

struct SliceSVD {
  Matrix u;
  Vector sigma;
  Matrix v;
};

/// SVD of one slice; economy factors unless `full` is set.
SliceSVD slice_svd(const Eigen::Ref<const Matrix>& a, bool full);
Vector slice_singular_values(const Eigen::Ref<const Matrix>& a);

}  // namespace detail

template <typename SpectralFn>
Tensor3 spectral_map(const Tensor3& x, const OrthogonalTransform& u, SpectralFn&& shape) {
  const Tensor3 xhat = apply_transform(x, u);
  Tensor3 out(x.dims());
  for (Index k = 0; k < x.n3(); ++k) {
    const detail::SliceSVD svd = detail::slice_svd(xhat.slice(k), false);
    Vector mapped = svd.sigma;
    Index keep = 0;
    for (Index j = 0; j < mapped.size(); ++j) {
      mapped(j) = shape(svd.sigma(j));
      if (mapped(j) != 0.0) keep = j + 1;
    }
    if (keep == 0) continue;
    out.slice(k).noalias() = svd.u.leftCols(keep) * mapped.head(keep).asDiagonal() *
                             svd.v.leftCols(keep).transpose();
  }
  return inverse_transform(out, u);
}

}  // namespace tlearn
