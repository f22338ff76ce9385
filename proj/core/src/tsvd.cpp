#include "tlearn/tsvd.hpp"

#include "tlearn/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

namespace tlearn {

namespace {

void require_transform_size(const Tensor3& x, const OrthogonalTransform& u, const char* where) {
  if (u.size() != x.n3()) {
    throw DimensionError(std::string(where) + ": transform is " + std::to_string(u.size()) +
                         "x" + std::to_string(u.size()) + " but tensor has n3 = " +
                         std::to_string(x.n3()));
  }
}

}  // namespace

namespace detail {

SliceSVD slice_svd(const Eigen::Ref<const Matrix>& a, bool full) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  const lapack_int ucols = full ? m : k;
  const lapack_int vtrows = full ? n : k;
  const char job = full ? 'A' : 'S';

  SliceSVD out{Matrix(m, ucols), Vector(k), Matrix()};
  Matrix vt(vtrows, n);
  Matrix work = a;
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, job, m, n, work.data(), m,
                                   out.sigma.data(), out.u.data(), m, vt.data(), vtrows);
  if (info > 0) {
    // Divide and conquer did not converge; QR iteration is slower but sturdier.
    work = a;
    std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(k, 1)));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, job, job, m, n, work.data(), m, out.sigma.data(),
                          out.u.data(), m, vt.data(), vtrows, superb.data());
  }
  if (info != 0) throw NumericalError("slice SVD failed (LAPACK info " + std::to_string(info) + ")");
  out.v = vt.transpose();
  return out;
}

Vector slice_singular_values(const Eigen::Ref<const Matrix>& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  Vector sigma(std::min(m, n));
  Matrix work = a;
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m,
                                         sigma.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("slice SVD failed (LAPACK info " + std::to_string(info) + ")");
  return sigma;
}

}  // namespace detail

Tensor3 apply_transform(const Tensor3& x, const OrthogonalTransform& u) {
  require_transform_size(x, u, "apply_transform");
  if (u.kind() == TransformKind::Identity) return x;
  Tensor3 out(x.dims());
  out.tubes_by_column().noalias() = x.tubes_by_column() * u.matrix().transpose();
  return out;
}

Tensor3 inverse_transform(const Tensor3& xhat, const OrthogonalTransform& u) {
  require_transform_size(xhat, u, "inverse_transform");
  if (u.kind() == TransformKind::Identity) return xhat;
  Tensor3 out(xhat.dims());
  out.tubes_by_column().noalias() = xhat.tubes_by_column() * u.matrix();
  return out;
}

Tensor3 t_product(const Tensor3& a, const Tensor3& b, const OrthogonalTransform& u) {
  if (a.n2() != b.n1() || a.n3() != b.n3()) {
    throw DimensionError("t_product: cannot multiply " + a.dims().str() + " by " +
                         b.dims().str());
  }
  const Tensor3 ahat = apply_transform(a, u);
  const Tensor3 bhat = apply_transform(b, u);
  Tensor3 chat(a.n1(), b.n2(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) chat.slice(k).noalias() = ahat.slice(k) * bhat.slice(k);
  return inverse_transform(chat, u);
}

Tensor3 t_transpose(const Tensor3& x, const OrthogonalTransform& u) {
  const Tensor3 xhat = apply_transform(x, u);
  Tensor3 that(x.n2(), x.n1(), x.n3());
  for (Index k = 0; k < x.n3(); ++k) that.slice(k) = xhat.slice(k).transpose();
  return inverse_transform(that, u);
}

Tensor3 identity_tensor(Index n, const OrthogonalTransform& u) {
  Tensor3 ihat(n, n, u.size());
  for (Index k = 0; k < u.size(); ++k) ihat.slice(k).setIdentity();
  return inverse_transform(ihat, u);
}

Tensor3 TSVDFactors::sigma_tensor() const {
  Tensor3 shat(u_tensor.n1(), v_tensor.n1(), u_tensor.n3());
  for (Index k = 0; k < shat.n3(); ++k) {
    const Vector& s = sigma[static_cast<std::size_t>(k)];
    for (Index j = 0; j < s.size(); ++j) shat(j, j, k) = s(j);
  }
  return inverse_transform(shat, transform);
}

Tensor3 TSVDFactors::reconstruct() const {
  return t_product(t_product(u_tensor, sigma_tensor(), transform),
                   t_transpose(v_tensor, transform), transform);
}

TSVDFactors t_svd(const Tensor3& x, const OrthogonalTransform& u) {
  const Tensor3 xhat = apply_transform(x, u);
  Tensor3 uhat(x.n1(), x.n1(), x.n3());
  Tensor3 vhat(x.n2(), x.n2(), x.n3());
  std::vector<Vector> sigma;
  sigma.reserve(static_cast<std::size_t>(x.n3()));
  for (Index k = 0; k < x.n3(); ++k) {
    detail::SliceSVD svd = detail::slice_svd(xhat.slice(k), true);
    uhat.slice(k) = svd.u;
    vhat.slice(k) = svd.v;
    sigma.push_back(std::move(svd.sigma));
  }
  return {inverse_transform(uhat, u), std::move(sigma), inverse_transform(vhat, u), u};
}

std::vector<Vector> transformed_singular_values(const Tensor3& x, const OrthogonalTransform& u) {
  const Tensor3 xhat = apply_transform(x, u);
  std::vector<Vector> sigma;
  sigma.reserve(static_cast<std::size_t>(x.n3()));
  for (Index k = 0; k < x.n3(); ++k) {
    sigma.push_back(detail::slice_singular_values(xhat.slice(k)));
  }
  return sigma;
}

double ttnn(const Tensor3& x, const OrthogonalTransform& u) {
  double total = 0.0;
  for (const Vector& s : transformed_singular_values(x, u)) total += s.sum();
  return total;
}

double spectral_norm_u(const Tensor3& x, const OrthogonalTransform& u) {
  double best = 0.0;
  for (const Vector& s : transformed_singular_values(x, u)) {
    if (s.size() > 0) best = std::max(best, s(0));
  }
  return best;
}

MultiRank multi_rank(const Tensor3& x, const OrthogonalTransform& u, double tol) {
  if (tol < 0.0) throw ParameterError("multi_rank: tolerance must be nonnegative");
  const std::vector<Vector> sigma = transformed_singular_values(x, u);
  double top = 0.0;
  for (const Vector& s : sigma) {
    if (s.size() > 0) top = std::max(top, s(0));
  }
  MultiRank rank;
  rank.ranks.reserve(sigma.size());
  for (const Vector& s : sigma) {
    Index r = 0;
    if (top > 0.0) {
      for (Index j = 0; j < s.size(); ++j) {
        if (s(j) > tol * top) ++r;
      }
    }
    rank.ranks.push_back(r);
  }
  return rank;
}

}  // namespace tlearn
