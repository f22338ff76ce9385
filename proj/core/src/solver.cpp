#include "tlearn/solver.hpp"

#include "tlearn/tsvd.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace tlearn {

namespace {

constexpr double kGoldenRatio = 1.6180339887498949;  // (1 + sqrt 5) / 2

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ParameterError(std::string(field) + " must satisfy " + rule);
}

struct AdmmRun {
  SubproblemResult result;
  int iters_to_tol = -1;
};

// Algorithm core. `accept` is consulted once the KKT tolerance is met; the
// loop keeps iterating (within max_inner) until it returns true.
AdmmRun run_admm(const Tensor3& xt, const Tensor3& grad_f_xt, const Tensor3& grad_s2_xt,
                 const PenaltyParams& penalty, const OrthogonalTransform& u,
                 const PmmConfig& pmm, const AdmmConfig& admm, std::optional<AdmmState> warm,
                 const std::function<bool(const Tensor3&)>& accept) {
  require_same_dims(xt.dims(), grad_f_xt.dims(), "admm_subproblem");
  require_same_dims(xt.dims(), grad_s2_xt.dims(), "admm_subproblem");
  AdmmState state = warm ? std::move(*warm)
                         : AdmmState{Tensor3(xt.dims()), xt, Tensor3(xt.dims())};
  require_same_dims(xt.dims(), state.x.dims(), "admm_subproblem warm start");

  // rho * X^t - grad f(X^t) + beta * grad S2(X^t) is fixed for the whole solve.
  Tensor3 linear = pmm.rho * xt;
  linear -= grad_f_xt;
  linear += pmm.beta * grad_s2_xt;

  const double theta = pmm.beta / admm.eta;
  AdmmRun run;
  KktResiduals kkt;
  int k = 0;
  bool done = false;
  while (!done && k < admm.max_inner) {
    Tensor3 shifted = state.x;
    shifted += (1.0 / admm.eta) * state.z;
    // beta = 0 leaves nothing to shrink.
    state.m = theta > 0.0 ? prox_s1(shifted, theta, u, penalty) : std::move(shifted);

    Tensor3 h = linear;
    h += admm.eta * state.m;
    h -= state.z;
    h *= 1.0 / (pmm.rho + admm.eta);
    state.x = project_box(h, pmm.box_c);

    Tensor3 gap = state.x;
    gap -= state.m;
    state.z += (admm.tau * admm.eta) * gap;
    ++k;

    kkt = kkt_residual(state.x, state.m, state.z, xt, grad_f_xt, grad_s2_xt, penalty, u, pmm);
    if (kkt.eta_res <= admm.tol_inner) {
      if (run.iters_to_tol < 0) run.iters_to_tol = k;
      done = !accept || accept(state.x);
    }
  }
  run.result.x_next = state.x;
  run.result.kkt = kkt;
  run.result.inner_iters = k;
  run.result.converged = kkt.eta_res <= admm.tol_inner;
  run.result.state = std::move(state);
  return run;
}

}  // namespace

void PmmConfig::validate() const {
  require(rho > 0.0 && std::isfinite(rho), "rho", "rho > 0");
  require(beta >= 0.0 && std::isfinite(beta), "beta", "beta >= 0");
  require(box_c > 0.0 && std::isfinite(box_c), "box_c", "box_c > 0");
  require(xi > 0.0 && xi < 0.5, "xi", "0 < xi < 1/2");
  require(max_outer >= 0, "max_outer", "max_outer >= 0");
  require(tol_outer > 0.0, "tol_outer", "tol_outer > 0");
  if (lipschitz) {
    require(*lipschitz > 0.0 && std::isfinite(*lipschitz), "lipschitz", "lipschitz > 0");
  }
}

void AdmmConfig::validate() const {
  require(eta > 0.0 && std::isfinite(eta), "eta", "eta > 0");
  require(tau > 0.0 && tau < kGoldenRatio, "tau", "0 < tau < (1 + sqrt 5) / 2");
  require(max_inner >= 1, "max_inner", "max_inner >= 1");
  require(tol_inner > 0.0, "tol_inner", "tol_inner > 0");
}

Objective objective_h(const Tensor3& x, const Loss& loss, const PenaltyParams& penalty,
                      const OrthogonalTransform& u, const PmmConfig& cfg) {
  Objective h;
  h.value = loss.value(x);
  if (cfg.beta != 0.0) h.value += cfg.beta * g_lambda(x, u, penalty);
  h.feasible = inf_norm(x) <= cfg.box_c + 1e-12;
  return h;
}

KktResiduals kkt_residual(const Tensor3& x, const Tensor3& m, const Tensor3& z,
                          const Tensor3& xt, const Tensor3& grad_f_xt,
                          const Tensor3& grad_s2_xt, const PenaltyParams& penalty,
                          const OrthogonalTransform& u, const PmmConfig& cfg) {
  KktResiduals r;
  const double norm_m = fro_norm(m);
  const double norm_x = fro_norm(x);
  const double norm_z = fro_norm(z);

  r.eta_e = fro_norm(m - x) / (1.0 + norm_m + norm_x);

  if (cfg.beta > 0.0) {
    r.eta_d = fro_norm(m - prox_s1(m + z, cfg.beta, u, penalty)) / (1.0 + norm_m + norm_z);
  } else {
    // Prox of the zero function is the identity: M - (M + Z) = -Z.
    r.eta_d = norm_z / (1.0 + norm_m + norm_z);
  }

  const double inv_rho = 1.0 / cfg.rho;
  Tensor3 direction = grad_f_xt;
  direction -= cfg.beta * grad_s2_xt;
  direction += z;
  Tensor3 target = xt;
  target -= inv_rho * direction;
  const double denom = 1.0 + inv_rho * norm_z + fro_norm(xt) + inv_rho * fro_norm(grad_f_xt) +
                       inv_rho * cfg.beta * fro_norm(grad_s2_xt);
  r.eta_p = fro_norm(x - project_box(target, cfg.box_c)) / denom;

  r.eta_res = std::max({r.eta_e, r.eta_d, r.eta_p});
  return r;
}

SubproblemResult admm_subproblem(const Tensor3& xt, const Tensor3& grad_f_xt,
                                 const Tensor3& grad_s2_xt, const PenaltyParams& penalty,
                                 const OrthogonalTransform& u, const PmmConfig& pmm,
                                 const AdmmConfig& admm, std::optional<AdmmState> warm) {
  pmm.validate();
  admm.validate();
  return run_admm(xt, grad_f_xt, grad_s2_xt, penalty, u, pmm, admm, std::move(warm), {})
      .result;
}

SolveResult pmm_solve(const Loss& loss, const PenaltyParams& penalty,
                      const OrthogonalTransform& u, const PmmConfig& pmm,
                      const AdmmConfig& admm, const Tensor3& x0) {
  pmm.validate();
  admm.validate();
  require_same_dims(x0.dims(), loss.dims(), "pmm_solve");
  if (u.size() != x0.n3()) throw DimensionError("pmm_solve: transform size does not match n3");
  if (!x0.all_finite()) throw DomainError("pmm_solve: initial point is not finite");

  SolveResult out{x0, {}};
  SolveTrace& trace = out.trace;
  trace.lipschitz = pmm.lipschitz ? *pmm.lipschitz : loss.lipschitz();
  trace.descent_a = 0.5 * ((1.0 - 2.0 * pmm.xi) * pmm.rho - trace.lipschitz);
  trace.descent_enforced = trace.descent_a > 0.0;
  if (!trace.descent_enforced) {
    std::ostringstream msg;
    msg << "rho = " << pmm.rho << " does not exceed L / (1 - 2 xi) = "
        << trace.lipschitz / (1.0 - 2.0 * pmm.xi) << "; descent is not guaranteed";
    trace.warnings.push_back(msg.str());
  }

  Objective current = objective_h(x0, loss, penalty, u, pmm);
  trace.initial_objective = current.value;
  trace.initial_feasible = current.feasible;

  Tensor3& x = out.x;
  std::optional<AdmmState> warm;
  for (int t = 0; t < pmm.max_outer; ++t) {
    const Tensor3 grad_f = loss.gradient(x);
    const Tensor3 grad_reg = grad_s2(x, u, penalty);

    std::function<bool(const Tensor3&)> accept;
    if (trace.descent_enforced && current.feasible) {
      accept = [&](const Tensor3& next) {
        const double step = fro_norm(next - x);
        return objective_h(next, loss, penalty, u, pmm).value + trace.descent_a * step * step <=
               current.value;
      };
    }
    AdmmRun run = run_admm(x, grad_f, grad_reg, penalty, u, pmm, admm, std::move(warm), accept);
    SubproblemResult& sub = run.result;

    TraceEntry entry;
    entry.iteration = t;
    entry.inner_iters = sub.inner_iters;
    entry.inner_iters_to_tol = run.iters_to_tol;
    entry.kkt = sub.kkt;

    if (!sub.x_next.all_finite()) {
      trace.steps.push_back(entry);
      throw DivergenceError("pmm_solve: non-finite iterate at outer iteration " +
                                std::to_string(t),
                            trace);
    }

    const Objective next = objective_h(sub.x_next, loss, penalty, u, pmm);
    const double x_norm = fro_norm(x);
    entry.step_norm = fro_norm(sub.x_next - x);
    if (x_norm > 0.0) {
      entry.relative_step = entry.step_norm / x_norm;
    } else {
      entry.relative_step = entry.step_norm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    entry.objective = next.value;
    entry.feasible = next.feasible;
    if (trace.descent_enforced && current.feasible) {
      entry.descent_ok = next.value + trace.descent_a * entry.step_norm * entry.step_norm <=
                         current.value + 1e-9;
    }
    if (!std::isfinite(next.value)) {
      trace.steps.push_back(entry);
      throw DivergenceError("pmm_solve: objective is not finite at outer iteration " +
                                std::to_string(t),
                            trace);
    }
    trace.steps.push_back(entry);

    x = std::move(sub.x_next);
    warm = std::move(sub.state);
    current = next;
    if (entry.relative_step <= pmm.tol_outer) {
      trace.converged = true;
      break;
    }
  }
  return out;
}

std::vector<double> descent_gaps(const SolveTrace& trace) {
  std::vector<double> gaps;
  gaps.reserve(trace.steps.size());
  double previous = trace.initial_objective;
  for (const TraceEntry& e : trace.steps) {
    gaps.push_back(e.objective + trace.descent_a * e.step_norm * e.step_norm - previous);
    previous = e.objective;
  }
  return gaps;
}

}  // namespace tlearn
