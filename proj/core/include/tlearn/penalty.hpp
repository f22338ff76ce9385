#pragma once

#include "tlearn/tensor.hpp"
#include "tlearn/transform.hpp"

#include <string_view>

namespace tlearn {

enum class PenaltyKind { Mcp, Scad, Log, Convex };

std::string_view to_string(PenaltyKind kind);
/// Accepts "mcp", "scad", "log", "convex" (also "ttnn" for convex).
PenaltyKind parse_penalty_kind(std::string_view name);

/// Folded-concave scalar penalty g applied to singular values, together with
/// its difference-of-convex split g = s1 - s2 where s1(x) = lambda * x.
///
/// gamma is ignored for the convex kind. Constructor enforces lambda > 0,
/// gamma > 0 (MCP, LOG) and gamma > 1 (SCAD).
class PenaltyParams {
 public:
  PenaltyParams(PenaltyKind kind, double lambda, double gamma = 0.0);

  PenaltyKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }

  /// Slope factor: g'(0+) = lambda * k0.
  double k0() const;
  /// Lipschitz constant of s2'; g(x) + mu/2 x^2 is convex.
  double mu() const;

  double g_value(double x) const;
  /// Derivative of g; at x = 0 returns the right limit lambda * k0.
  double g_derivative(double x) const;
  double s1_value(double x) const;
  double s2_value(double x) const;
  double s2_derivative(double x) const;

 private:
  PenaltyKind kind_;
  double lambda_;
  double gamma_;
};

/// Sum of g over the singular values of every transformed slice.
double g_lambda(const Tensor3& x, const OrthogonalTransform& u, const PenaltyParams& p);
/// Same sum for s2. g_lambda = lambda * ttnn - s2_total.
double s2_total(const Tensor3& x, const OrthogonalTransform& u, const PenaltyParams& p);
/// Gradient of s2_total via the spectral calculus: U * diag(s2'(sigma)) * V^T.
Tensor3 grad_s2(const Tensor3& x, const OrthogonalTransform& u, const PenaltyParams& p);

/// argmin_M 1/2 ||M - a||_F^2 + theta * lambda * ttnn(M): shrinks each
/// transformed singular value by theta * lambda.
Tensor3 prox_s1(const Tensor3& a, double theta, const OrthogonalTransform& u,
                const PenaltyParams& p);

}  // namespace tlearn
