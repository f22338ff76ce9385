#pragma once

#include "tlearn/errors.hpp"
#include "tlearn/loss.hpp"
#include "tlearn/penalty.hpp"
#include "tlearn/tensor.hpp"
#include "tlearn/transform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tlearn {

/// Outer (majorization) loop settings.
struct PmmConfig {
  double rho = 10.0;     // proximal weight
  double beta = 1.0;     // regularization weight
  double box_c = 1.0;    // feasible set is ||X||_inf <= box_c
  double xi = 0.1;       // inexactness constant, in (0, 1/2)
  int max_outer = 100;
  double tol_outer = 5e-4;  // on ||X^{t+1} - X^t||_F / ||X^t||_F
  /// Gradient Lipschitz constant used for the descent test instead of
  /// loss.lipschitz(). Must itself be a valid constant for the loss.
  std::optional<double> lipschitz;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

/// Inner ADMM settings.
struct AdmmConfig {
  double eta = 10.0;    // augmented Lagrangian weight
  double tau = 1.618;   // dual step factor, in (0, (1 + sqrt 5) / 2)
  int max_inner = 100;
  double tol_inner = 3e-3;  // on the relative KKT residual

  void validate() const;
};

struct KktResiduals {
  double eta_e = 0.0;  // primal feasibility ||M - X||
  double eta_d = 0.0;  // dual optimality for the S1 block
  double eta_p = 0.0;  // optimality for the box-constrained block
  double eta_res = 0.0;  // max of the three
};

/// ADMM iterates carried between outer iterations.
struct AdmmState {
  Tensor3 m;
  Tensor3 x;
  Tensor3 z;
};

struct SubproblemResult {
  Tensor3 x_next;
  AdmmState state;
  KktResiduals kkt;
  int inner_iters = 0;
  bool converged = false;  // kkt.eta_res <= tol_inner
};

struct Objective {
  double value = 0.0;  // f(X) + beta * G(X)
  bool feasible = true;  // ||X||_inf <= box_c
};

struct TraceEntry {
  int iteration = 0;          // t; the entry describes the step X^t -> X^{t+1}
  double objective = 0.0;     // H(X^{t+1})
  double step_norm = 0.0;     // ||X^{t+1} - X^t||_F
  double relative_step = 0.0; // step_norm / ||X^t||_F
  int inner_iters = 0;        // total ADMM iterations spent on this step
  int inner_iters_to_tol = -1;  // first iteration with eta_res <= tol_inner, -1 if never
  KktResiduals kkt;
  bool feasible = true;
  bool descent_ok = true;     // sufficient-descent inequality held (when enforced)
};

struct SolveTrace {
  double initial_objective = 0.0;  // H(X^0)
  bool initial_feasible = true;
  double lipschitz = 0.0;          // L of the loss gradient
  double descent_a = 0.0;          // ((1 - 2 xi) rho - L) / 2
  bool descent_enforced = false;   // rho > L / (1 - 2 xi)
  bool converged = false;          // stopped on tol_outer
  std::vector<TraceEntry> steps;
  std::vector<std::string> warnings;
};

struct SolveResult {
  Tensor3 x;
  SolveTrace trace;
};

/// A non-finite iterate appeared; carries the trace up to that point.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, SolveTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const { return trace_; }

 private:
  SolveTrace trace_;
};

Objective objective_h(const Tensor3& x, const Loss& loss, const PenaltyParams& penalty,
                      const OrthogonalTransform& u, const PmmConfig& cfg);

KktResiduals kkt_residual(const Tensor3& x, const Tensor3& m, const Tensor3& z,
                          const Tensor3& xt, const Tensor3& grad_f_xt,
                          const Tensor3& grad_s2_xt, const PenaltyParams& penalty,
                          const OrthogonalTransform& u, const PmmConfig& cfg);

/// Two-block ADMM on the linearized subproblem at xt. Without a warm state
/// the iterates start from M = Z = 0, X = xt.
SubproblemResult admm_subproblem(const Tensor3& xt, const Tensor3& grad_f_xt,
                                 const Tensor3& grad_s2_xt, const PenaltyParams& penalty,
                                 const OrthogonalTransform& u, const PmmConfig& pmm,
                                 const AdmmConfig& admm,
                                 std::optional<AdmmState> warm = std::nullopt);

/// Inexact proximal majorization-minimization from x0.
SolveResult pmm_solve(const Loss& loss, const PenaltyParams& penalty,
                      const OrthogonalTransform& u, const PmmConfig& pmm,
                      const AdmmConfig& admm, const Tensor3& x0);

/// H(X^{t+1}) + a ||X^{t+1} - X^t||^2 - H(X^t) for each step; <= 0 means descent.
std::vector<double> descent_gaps(const SolveTrace& trace);

}  // namespace tlearn
