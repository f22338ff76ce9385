#include "tlearn/penalty.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/tsvd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tlearn {

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Mcp:
      return "mcp";
    case PenaltyKind::Scad:
      return "scad";
    case PenaltyKind::Log:
      return "log";
    case PenaltyKind::Convex:
      return "convex";
  }
  return "convex";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mcp") return PenaltyKind::Mcp;
  if (lower == "scad") return PenaltyKind::Scad;
  if (lower == "log" || lower == "logarithm") return PenaltyKind::Log;
  if (lower == "convex" || lower == "ttnn") return PenaltyKind::Convex;
  throw ParameterError("unknown penalty kind '" + std::string(name) + "'");
}

PenaltyParams::PenaltyParams(PenaltyKind kind, double lambda, double gamma)
    : kind_(kind), lambda_(lambda), gamma_(gamma) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("penalty lambda must be positive and finite");
  }
  switch (kind) {
    case PenaltyKind::Mcp:
    case PenaltyKind::Log:
      if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ParameterError("penalty gamma must be positive for " +
                             std::string(to_string(kind)));
      }
      break;
    case PenaltyKind::Scad:
      if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw ParameterError("penalty gamma must exceed 1 for scad");
      }
      break;
    case PenaltyKind::Convex:
      break;
  }
}

namespace {

void require_nonnegative(double x, const char* where) {
  if (!(x >= 0.0)) throw DomainError(std::string(where) + ": argument must be nonnegative");
}

}  // namespace

double PenaltyParams::k0() const { return kind_ == PenaltyKind::Log ? 1.0 / gamma_ : 1.0; }

double PenaltyParams::mu() const {
  switch (kind_) {
    case PenaltyKind::Mcp:
      return 1.0 / gamma_;
    case PenaltyKind::Scad:
      return 1.0 / (gamma_ - 1.0);
    case PenaltyKind::Log:
      return lambda_ / (gamma_ * gamma_);
    case PenaltyKind::Convex:
      return 0.0;
  }
  return 0.0;
}

double PenaltyParams::g_value(double x) const {
  require_nonnegative(x, "g_value");
  const double l = lambda_;
  const double g = gamma_;
  switch (kind_) {
    case PenaltyKind::Mcp:
      return x <= g * l ? l * x - x * x / (2.0 * g) : 0.5 * g * l * l;
    case PenaltyKind::Scad:
      if (x < l) return l * x;
      if (x < g * l) return (-x * x + 2.0 * g * l * x - l * l) / (2.0 * (g - 1.0));
      return 0.5 * l * l * (g + 1.0);
    case PenaltyKind::Log:
      return l * std::log1p(x / g);
    case PenaltyKind::Convex:
      return l * x;
  }
  return 0.0;
}

double PenaltyParams::g_derivative(double x) const {
  require_nonnegative(x, "g_derivative");
  const double l = lambda_;
  const double g = gamma_;
  switch (kind_) {
    case PenaltyKind::Mcp:
      return x <= g * l ? l - x / g : 0.0;
    case PenaltyKind::Scad:
      if (x <= l) return l;
      if (x <= g * l) return (g * l - x) / (g - 1.0);
      return 0.0;
    case PenaltyKind::Log:
      return l / (x + g);
    case PenaltyKind::Convex:
      return l;
  }
  return 0.0;
}

double PenaltyParams::s1_value(double x) const {
  require_nonnegative(x, "s1_value");
  return lambda_ * x;
}

double PenaltyParams::s2_value(double x) const {
  require_nonnegative(x, "s2_value");
  const double l = lambda_;
  const double g = gamma_;
  switch (kind_) {
    case PenaltyKind::Mcp:
      return x <= g * l ? x * x / (2.0 * g) : l * x - 0.5 * g * l * l;
    case PenaltyKind::Scad:
      if (x < l) return 0.0;
      if (x < g * l) return (x - l) * (x - l) / (2.0 * (g - 1.0));
      return l * x - 0.5 * (g + 1.0) * l * l;
    case PenaltyKind::Log:
      // s2(0) = 0 extends the x > 0 formula continuously.
      return l * x - l * std::log1p(x / g);
    case PenaltyKind::Convex:
      return 0.0;
  }
  return 0.0;
}

double PenaltyParams::s2_derivative(double x) const {
  require_nonnegative(x, "s2_derivative");
  const double l = lambda_;
  const double g = gamma_;
  switch (kind_) {
    case PenaltyKind::Mcp:
      return x <= g * l ? x / g : l;
    case PenaltyKind::Scad:
      if (x <= l) return 0.0;
      if (x <= g * l) return (x - l) / (g - 1.0);
      return l;
    case PenaltyKind::Log:
      return l - l / (x + g);
    case PenaltyKind::Convex:
      return 0.0;
  }
  return 0.0;
}

double g_lambda(const Tensor3& x, const OrthogonalTransform& u, const PenaltyParams& p) {
  double total = 0.0;
  for (const Vector& s : transformed_singular_values(x, u)) {
    for (Index j = 0; j < s.size(); ++j) total += p.g_value(s(j));
  }
  return total;
}

double s2_total(const Tensor3& x, const OrthogonalTransform& u, const PenaltyParams& p) {
  if (p.kind() == PenaltyKind::Convex) return 0.0;
  double total = 0.0;
  for (const Vector& s : transformed_singular_values(x, u)) {
    for (Index j = 0; j < s.size(); ++j) total += p.s2_value(s(j));
  }
  return total;
}

Tensor3 grad_s2(const Tensor3& x, const OrthogonalTransform& u, const PenaltyParams& p) {
  if (p.kind() == PenaltyKind::Convex) return Tensor3(x.dims());
  return spectral_map(x, u, [&p](double s) { return p.s2_derivative(s); });
}

Tensor3 prox_s1(const Tensor3& a, double theta, const OrthogonalTransform& u,
                const PenaltyParams& p) {
  if (!(theta > 0.0)) throw ParameterError("prox_s1: theta must be positive");
  const double shrink = theta * p.lambda();
  return spectral_map(a, u, [shrink](double s) { return std::max(s - shrink, 0.0); });
}

}  // namespace tlearn
