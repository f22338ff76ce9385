#include "oracle.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/solver.hpp"
#include "tlearn/tasks.hpp"
#include "tlearn/tsvd.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tlearn;

namespace {

Tensor3 mat2(double a, double b, double c, double d) {
  // [[a, b], [c, d]] as a 2x2x1 tensor.
  return Tensor3(Dims{2, 2, 1}, {a, c, b, d});
}

/// Quadratic gradient paired with a NaN value.
class PoisonLoss final : public Loss {
 public:
  explicit PoisonLoss(Dims d) : dims_(d) {}
  Dims dims() const override { return dims_; }
  double value(const Tensor3&) const override { return std::numeric_limits<double>::quiet_NaN(); }
  Tensor3 gradient(const Tensor3& x) const override { return x; }
  double lipschitz() const override { return 1.0; }

 private:
  Dims dims_;
};

struct SmallCompletion {
  Tensor3 truth;
  CompletionData data;
};

SmallCompletion small_completion(std::uint64_t seed) {
  const Dims d{12, 12, 4};
  Tensor3 truth = synth_low_multirank(d, 1, dct_transform(4), seed);
  CompletionData data = observe({truth, 0.6, 0.01, seed + 1});
  return {std::move(truth), std::move(data)};
}

}  // namespace

TEST_CASE("config validation") {
  PmmConfig pmm;
  CHECK_NOTHROW(pmm.validate());
  pmm.xi = 0.7;
  CHECK_THROWS_AS(pmm.validate(), ParameterError);
  pmm.xi = 0.0;
  CHECK_THROWS_AS(pmm.validate(), ParameterError);
  pmm = PmmConfig{};
  pmm.rho = 0.0;
  CHECK_THROWS_AS(pmm.validate(), ParameterError);
  pmm = PmmConfig{};
  pmm.box_c = -1.0;
  CHECK_THROWS_AS(pmm.validate(), ParameterError);
  pmm = PmmConfig{};
  pmm.lipschitz = 0.0;
  CHECK_THROWS_AS(pmm.validate(), ParameterError);

  AdmmConfig admm;
  CHECK_NOTHROW(admm.validate());
  CHECK(admm.eta == 10.0);
  CHECK(admm.tau == 1.618);
  admm.tau = 2.0;
  CHECK_THROWS_AS(admm.validate(), ParameterError);
  admm.tau = 1.62;
  CHECK_THROWS_AS(admm.validate(), ParameterError);
  admm = AdmmConfig{};
  admm.max_inner = 0;
  CHECK_THROWS_AS(admm.validate(), ParameterError);
}

TEST_CASE("objective") {
  std::mt19937_64 rng(50);
  const Tensor3 y = oracle::random_tensor({3, 3, 2}, rng);
  const PenaltyParams p(PenaltyKind::Mcp, 0.5, 2.7);
  const OrthogonalTransform u = dct_transform(2);
  PmmConfig cfg;
  cfg.beta = 0.0;
  cfg.box_c = 10.0;
  const CompletionLoss full(y, Mask(y.dims(), true));
  CHECK(objective_h(y, full, p, u, cfg).value == 0.0);

  std::vector<Tensor3> samples{oracle::random_tensor({3, 3, 2}, rng)};
  const LogisticLoss logit(samples, {1});
  CHECK(objective_h(Tensor3(3, 3, 2), logit, p, u, cfg).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  cfg.beta = 1.7;
  const Tensor3 x = oracle::random_tensor({3, 3, 2}, rng);
  const Objective h = objective_h(x, full, p, u, cfg);
  CHECK(h.value == doctest::Approx(full.value(x) + 1.7 * g_lambda(x, u, p)).epsilon(1e-14));
  CHECK(h.feasible == (inf_norm(x) <= 10.0));
  cfg.box_c = 0.1;
  CHECK_FALSE(objective_h(x, full, p, u, cfg).feasible);
}

TEST_CASE("kkt residual") {
  const PenaltyParams p(PenaltyKind::Mcp, 1.0, 2.7);
  const OrthogonalTransform id = identity_transform(1);
  PmmConfig cfg;
  cfg.rho = 2.0;
  cfg.beta = 1.0;
  cfg.box_c = 0.9;

  const Tensor3 zero(2, 2, 1);
  const KktResiduals r0 = kkt_residual(zero, zero, zero, zero, zero, zero, p, id, cfg);
  CHECK(r0.eta_e == 0.0);
  CHECK(r0.eta_d == 0.0);
  CHECK(r0.eta_p == 0.0);
  CHECK(r0.eta_res == 0.0);

  // Hand instance; expected values evaluated from the three formulas.
  const Tensor3 x = mat2(1.5, 0.2, 0.0, 0.5);
  const Tensor3 m = mat2(2.0, 0.0, 0.0, 0.5);
  const Tensor3 z = mat2(1.0, 0.0, 0.0, 0.0);
  const Tensor3 xt = mat2(1.0, 0.0, 0.0, 1.0);
  const Tensor3 gf = mat2(0.5, 0.0, 0.1, 0.0);
  const Tensor3 gs = mat2(0.2, 0.0, 0.0, 0.0);
  const KktResiduals r = kkt_residual(x, m, z, xt, gf, gs, p, id, cfg);
  CHECK(r.eta_e == doctest::Approx(0.11567838226644024).epsilon(1e-12));
  CHECK(r.eta_d == doctest::Approx(0.12310562561766053).epsilon(1e-12));
  CHECK(r.eta_p == doctest::Approx(0.3777444937838509).epsilon(1e-12));
  CHECK(r.eta_res == std::max({r.eta_e, r.eta_d, r.eta_p}));

  const KktResiduals same = kkt_residual(x, x, zero, xt, gf, gs, p, id, cfg);
  CHECK(same.eta_e == 0.0);
}

TEST_CASE("admm subproblem") {
  const PenaltyParams p(PenaltyKind::Mcp, 1.0, 2.7);
  const OrthogonalTransform u = dct_transform(3);
  PmmConfig pmm;
  AdmmConfig admm;

  SUBCASE("zero stationary point") {
    const Tensor3 zero(3, 3, 3);
    const SubproblemResult r = admm_subproblem(zero, zero, zero, p, u, pmm, admm);
    CHECK(r.inner_iters == 1);
    CHECK(r.x_next == zero);
    CHECK(r.state.m == zero);
    CHECK(r.kkt.eta_res == 0.0);
    CHECK(r.converged);
  }
  SUBCASE("beta = 0 closes the primal gap") {
    std::mt19937_64 rng(51);
    pmm.beta = 0.0;
    pmm.box_c = 3.0;
    admm.tol_inner = 1e-14;
    const Tensor3 xt = oracle::random_tensor({4, 3, 3}, rng);
    const Tensor3 gf = oracle::random_tensor({4, 3, 3}, rng);
    const Tensor3 gs = oracle::random_tensor({4, 3, 3}, rng);
    const SubproblemResult r = admm_subproblem(xt, gf, gs, p, u, pmm, admm);
    CHECK(r.inner_iters <= 100);
    CHECK(fro_norm(r.state.x - r.state.m) <= 1e-6);
    // The limit is the projected step from xt.
    const Tensor3 expected = project_box(xt - (1.0 / pmm.rho) * gf, pmm.box_c);
    CHECK(fro_norm(r.x_next - expected) <= 1e-6);
  }
  SUBCASE("one inner step follows the update formulas") {
    std::mt19937_64 rng(52);
    admm.max_inner = 1;
    pmm.box_c = 0.8;
    const Tensor3 xt = oracle::random_tensor({3, 4, 3}, rng);
    const Tensor3 gf = oracle::random_tensor({3, 4, 3}, rng);
    const Tensor3 gs = oracle::random_tensor({3, 4, 3}, rng);
    const AdmmState warm{oracle::random_tensor({3, 4, 3}, rng), oracle::random_tensor({3, 4, 3}, rng),
                         oracle::random_tensor({3, 4, 3}, rng)};
    const SubproblemResult r = admm_subproblem(xt, gf, gs, p, u, pmm, admm, warm);
    const Tensor3 m = prox_s1(warm.x + (1.0 / admm.eta) * warm.z, pmm.beta / admm.eta, u, p);
    const Tensor3 h = pmm.rho * xt - gf + pmm.beta * gs + admm.eta * m - warm.z;
    const Tensor3 x = project_box((1.0 / (pmm.rho + admm.eta)) * h, pmm.box_c);
    const Tensor3 z = warm.z + admm.tau * admm.eta * (x - m);
    CHECK(fro_norm(r.state.m - m) <= 1e-13);
    CHECK(fro_norm(r.state.x - x) <= 1e-13);
    CHECK(fro_norm(r.state.z - z) <= 1e-12);
  }
}

TEST_CASE("pmm solve") {
  SUBCASE("max_outer = 0 returns x0") {
    std::mt19937_64 rng(53);
    const Tensor3 y = oracle::random_tensor({3, 3, 2}, rng);
    const CompletionLoss loss(y, Mask(y.dims(), true));
    PmmConfig pmm;
    pmm.max_outer = 0;
    pmm.box_c = 10.0;
    const SolveResult r = pmm_solve(loss, PenaltyParams(PenaltyKind::Mcp, 1.0, 2.7),
                                    dct_transform(2), pmm, AdmmConfig{}, y);
    CHECK(r.x == y);
    CHECK(r.trace.steps.empty());
  }
  SUBCASE("beta = 0 full mask recovers y") {
    std::mt19937_64 rng(54);
    const Tensor3 y = oracle::random_tensor({4, 3, 3}, rng, 0.3);
    const CompletionLoss loss(y, Mask(y.dims(), true));
    PmmConfig pmm;
    pmm.beta = 0.0;
    pmm.rho = 2.0;
    pmm.box_c = 2.0;
    pmm.tol_outer = 1e-9;
    pmm.max_outer = 200;
    AdmmConfig admm;
    admm.tol_inner = 1e-10;
    const SolveResult r = pmm_solve(loss, PenaltyParams(PenaltyKind::Mcp, 1.0, 2.7),
                                    dct_transform(3), pmm, admm, Tensor3(y.dims()));
    CHECK(fro_norm(r.x - y) <= 1e-6 * fro_norm(y));
    CHECK(r.trace.converged);
  }
  SUBCASE("descent, feasibility, summable steps, determinism") {
    const SmallCompletion sc = small_completion(5);
    const CompletionLoss& loss = sc.data.loss;
    const OrthogonalTransform u = dct_transform(4);
    for (PenaltyKind kind : {PenaltyKind::Mcp, PenaltyKind::Scad, PenaltyKind::Log,
                             PenaltyKind::Convex}) {
      CAPTURE(to_string(kind));
      const PenaltyParams p(kind, 1.0, kind == PenaltyKind::Scad ? 3.7 : 2.7);
      PmmConfig pmm;
      pmm.rho = 3.5;
      pmm.box_c = default_completion_box(loss);
      pmm.max_outer = 400;
      const SolveResult r = pmm_solve(loss, p, u, pmm, AdmmConfig{}, loss.observed());
      CHECK(r.trace.descent_enforced);
      CHECK(r.trace.warnings.empty());
      for (double gap : descent_gaps(r.trace)) CHECK(gap <= 1e-9);
      double prev = r.trace.initial_objective;
      for (const TraceEntry& e : r.trace.steps) {
        CHECK(e.descent_ok);
        CHECK(e.feasible);
        CHECK(e.kkt.eta_res == std::max({e.kkt.eta_e, e.kkt.eta_d, e.kkt.eta_p}));
        CHECK(e.objective <= prev + 1e-9);
        prev = e.objective;
      }
      CHECK(inf_norm(r.x) <= pmm.box_c + 1e-12);
      REQUIRE(r.trace.converged);
      const auto& steps = r.trace.steps;
      // Telescoping the descent inequality bounds the squared steps.
      double squares = 0.0;
      for (const TraceEntry& e : steps) squares += e.step_norm * e.step_norm;
      CHECK(r.trace.descent_a * squares <=
            r.trace.initial_objective - steps.back().objective + 1e-9 * steps.size());

      const SolveResult again = pmm_solve(loss, p, u, pmm, AdmmConfig{}, loss.observed());
      CHECK(again.x == r.x);
      REQUIRE(again.trace.steps.size() == steps.size());
      for (std::size_t t = 0; t < steps.size(); ++t) {
        CHECK(again.trace.steps[t].objective == steps[t].objective);
      }
      if (kind == PenaltyKind::Convex) {
        const auto final_rank = multi_rank(r.x, u).ranks;
        const auto start_rank = multi_rank(loss.observed(), u).ranks;
        for (std::size_t k = 0; k < final_rank.size(); ++k) CHECK(final_rank[k] <= start_rank[k]);
      }
    }
  }
  SUBCASE("small rho warns and disables the descent test") {
    const SmallCompletion sc = small_completion(6);
    PmmConfig pmm;
    pmm.rho = 1.0;  // below L / (1 - 2 xi) = 1 / (0.6 * 0.8)
    pmm.max_outer = 3;
    pmm.box_c = default_completion_box(sc.data.loss);
    const SolveResult r = pmm_solve(sc.data.loss, PenaltyParams(PenaltyKind::Mcp, 1.0, 2.7),
                                    dct_transform(4), pmm, AdmmConfig{}, sc.data.loss.observed());
    CHECK_FALSE(r.trace.descent_enforced);
    CHECK(r.trace.warnings.size() == 1);
  }
  SUBCASE("lipschitz override feeds the descent constant") {
    const SmallCompletion sc = small_completion(7);
    PmmConfig pmm;
    pmm.rho = 4.0;
    pmm.max_outer = 2;
    pmm.lipschitz = 1.0;
    pmm.box_c = default_completion_box(sc.data.loss);
    const SolveResult r = pmm_solve(sc.data.loss, PenaltyParams(PenaltyKind::Mcp, 1.0, 2.7),
                                    dct_transform(4), pmm, AdmmConfig{}, sc.data.loss.observed());
    CHECK(r.trace.lipschitz == 1.0);
    CHECK(r.trace.descent_a == doctest::Approx(0.5 * (0.8 * 4.0 - 1.0)));
  }
  SUBCASE("non-finite iterate raises divergence with the trace") {
    const PoisonLoss loss({2, 2, 2});
    PmmConfig pmm;
    pmm.box_c = 1.0;
    const Tensor3 x0 = Tensor3::constant({2, 2, 2}, 0.5);
    try {
      pmm_solve(loss, PenaltyParams(PenaltyKind::Convex, 0.1), identity_transform(2), pmm,
                AdmmConfig{}, x0);
      FAIL("expected a divergence error");
    } catch (const DivergenceError& e) {
      CHECK(e.trace().steps.size() == 1);
    }
  }
  SUBCASE("shape checks") {
    const CompletionLoss loss(Tensor3(2, 2, 2), Mask({2, 2, 2}, true));
    CHECK_THROWS_AS(pmm_solve(loss, PenaltyParams(PenaltyKind::Convex, 1.0), dct_transform(2),
                              PmmConfig{}, AdmmConfig{}, Tensor3(2, 2, 3)),
                    DimensionError);
    CHECK_THROWS_AS(pmm_solve(loss, PenaltyParams(PenaltyKind::Convex, 1.0), dct_transform(3),
                              PmmConfig{}, AdmmConfig{}, Tensor3(2, 2, 2)),
                    DimensionError);
  }
}
