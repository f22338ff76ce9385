#include "oracle.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/penalty.hpp"
#include "tlearn/tsvd.hpp"

#include <doctest.h>

#include <cmath>

using namespace tlearn;

namespace {

std::vector<PenaltyParams> all_kinds(double lambda) {
  return {PenaltyParams(PenaltyKind::Mcp, lambda, 2.7), PenaltyParams(PenaltyKind::Scad, lambda, 3.7),
          PenaltyParams(PenaltyKind::Log, lambda, 1.5), PenaltyParams(PenaltyKind::Convex, lambda)};
}

bool min_gap_at_least(const Tensor3& x, const OrthogonalTransform& u, double gap) {
  for (const Vector& s : transformed_singular_values(x, u)) {
    for (Index j = 0; j + 1 < s.size(); ++j) {
      if (s(j) - s(j + 1) < gap) return false;
    }
    if (s.size() > 0 && s(s.size() - 1) < gap) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parameter validation and parsing") {
  CHECK_THROWS_AS(PenaltyParams(PenaltyKind::Mcp, 0.0, 2.0), ParameterError);
  CHECK_THROWS_AS(PenaltyParams(PenaltyKind::Mcp, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(PenaltyParams(PenaltyKind::Log, 1.0, -1.0), ParameterError);
  CHECK_THROWS_AS(PenaltyParams(PenaltyKind::Scad, 1.0, 1.0), ParameterError);
  CHECK_NOTHROW(PenaltyParams(PenaltyKind::Convex, 1.0));
  CHECK(parse_penalty_kind("MCP") == PenaltyKind::Mcp);
  CHECK(parse_penalty_kind("ttnn") == PenaltyKind::Convex);
  CHECK_THROWS_AS(parse_penalty_kind("lasso"), ParameterError);
}

TEST_CASE("scalar penalty values") {
  for (const auto& p : all_kinds(0.8)) CHECK(p.g_value(0.0) == 0.0);

  const PenaltyParams mcp(PenaltyKind::Mcp, 1.0, 2.7);
  CHECK(mcp.g_value(2.7) == doctest::Approx(1.35).epsilon(1e-14));
  CHECK(mcp.g_value(10.0) == doctest::Approx(1.35).epsilon(1e-14));
  const PenaltyParams scad(PenaltyKind::Scad, 1.0, 3.0);
  CHECK(scad.g_value(3.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(scad.g_value(7.0) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(PenaltyParams(PenaltyKind::Mcp, 1.0, 2.0).g_derivative(2.0) == 0.0);
  CHECK(PenaltyParams(PenaltyKind::Log, 1.0, 2.0).g_derivative(0.0) ==
        doctest::Approx(0.5).epsilon(1e-15));

  const PenaltyParams mcp2(PenaltyKind::Mcp, 1.0, 2.0);
  CHECK(mcp2.s2_value(1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(scad.s2_value(0.5) == 0.0);
  CHECK(scad.s2_derivative(0.5) == 0.0);
  CHECK(mcp.s2_derivative(0.0) == 0.0);
  CHECK(scad.s2_derivative(0.0) == 0.0);
  const PenaltyParams log(PenaltyKind::Log, 2.0, 4.0);
  CHECK(log.s2_derivative(0.0) == doctest::Approx(2.0 * (1.0 - 1.0 / 4.0)).epsilon(1e-15));
  CHECK(log.s2_value(0.0) == 0.0);

  CHECK(mcp.mu() == doctest::Approx(1.0 / 2.7).epsilon(1e-15));
  CHECK(mcp.mu() == doctest::Approx(0.37037).epsilon(1e-5));
  CHECK(scad.mu() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(PenaltyParams(PenaltyKind::Convex, 3.0).mu() == 0.0);
  CHECK(log.mu() == doctest::Approx(2.0 / 16.0).epsilon(1e-15));
  CHECK(mcp.k0() == 1.0);
  CHECK(log.k0() == doctest::Approx(0.25).epsilon(1e-15));

  for (const auto& p : all_kinds(1.0)) {
    CHECK_THROWS_AS(p.g_value(-1e-3), DomainError);
    CHECK_THROWS_AS(p.g_derivative(-1.0), DomainError);
    CHECK_THROWS_AS(p.s2_value(-1.0), DomainError);
    CHECK_THROWS_AS(p.s2_derivative(-1.0), DomainError);
  }
}

TEST_CASE("scalar penalty properties on a grid") {
  const int n = 10000;
  const double hi = 12.0;
  for (const auto& p : all_kinds(1.3)) {
    CAPTURE(to_string(p.kind()));
    const double bound = p.lambda() * p.k0();
    CHECK(p.g_derivative(0.0) == doctest::Approx(bound).epsilon(1e-15));
    double prev_g = 0.0, prev_d = p.g_derivative(0.0), prev_s2d = p.s2_derivative(0.0);
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
      const double x = hi * i / n;
      const double g = p.g_value(x);
      const double d = p.g_derivative(x);
      const double s2d = p.s2_derivative(x);
      CHECK(g >= prev_g - 1e-12);             // nondecreasing
      CHECK(d <= prev_d + 1e-12);             // concave
      CHECK(d <= bound + 1e-12);
      CHECK(g / x <= prev_ratio + 1e-12);     // g(x)/x nonincreasing
      CHECK(s2d >= prev_s2d - 1e-12);         // s2 convex
      CHECK(std::abs(s2d - prev_s2d) <= p.mu() * (hi / n) + 1e-12);
      CHECK(std::abs(g - (p.s1_value(x) - p.s2_value(x))) <= 1e-12 * std::max(1.0, g));
      prev_g = g;
      prev_d = d;
      prev_s2d = s2d;
      prev_ratio = g / x;
    }
  }
  // Continuity at the breakpoints.
  const PenaltyParams mcp(PenaltyKind::Mcp, 1.3, 2.7);
  const PenaltyParams scad(PenaltyKind::Scad, 1.3, 3.7);
  const double eps = 1e-13;
  for (double knot : {2.7 * 1.3}) {
    CHECK(std::abs(mcp.g_value(knot - eps) - mcp.g_value(knot + eps)) <= 1e-12);
  }
  for (double knot : {1.3, 3.7 * 1.3}) {
    CHECK(std::abs(scad.g_value(knot - eps) - scad.g_value(knot + eps)) <= 1e-12);
    CHECK(std::abs(scad.g_derivative(knot - eps) - scad.g_derivative(knot + eps)) <= 1e-12);
  }
}

TEST_CASE("tensor regularizer and S2") {
  std::mt19937_64 rng(30);
  const OrthogonalTransform u = dct_transform(4);
  CHECK(g_lambda(Tensor3(3, 3, 4), u, PenaltyParams(PenaltyKind::Mcp, 1.0, 2.7)) == 0.0);
  CHECK(s2_total(Tensor3(3, 3, 4), u, PenaltyParams(PenaltyKind::Mcp, 1.0, 2.7)) == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor3 x = oracle::random_tensor({5, 4, 4}, rng, 1.5);
    const double tnn = ttnn(x, u);
    const PenaltyParams convex(PenaltyKind::Convex, 2.0);
    CHECK(g_lambda(x, u, convex) == doctest::Approx(2.0 * tnn).epsilon(1e-12));
    CHECK(s2_total(x, u, convex) == 0.0);
    for (const auto& p : all_kinds(0.9)) {
      const double g = g_lambda(x, u, p);
      CHECK(std::abs(g + s2_total(x, u, p) - p.lambda() * tnn) <= 1e-10 * p.lambda() * tnn);
      double ref = 0.0;
      for (Index k = 0; k < 4; ++k) {
        const Vector s = oracle::singular_values(oracle::transformed_slice(x, u.matrix(), k));
        for (Index j = 0; j < s.size(); ++j) ref += p.g_value(s(j));
      }
      CHECK(g == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("grad_s2") {
  SUBCASE("convex gives zero") {
    std::mt19937_64 rng(31);
    const Tensor3 x = oracle::random_tensor({3, 3, 2}, rng);
    CHECK(grad_s2(x, dct_transform(2), PenaltyParams(PenaltyKind::Convex, 1.0)) == Tensor3(3, 3, 2));
  }
  SUBCASE("diagonal matrix, MCP past the knee") {
    Tensor3 x(2, 2, 1);
    x(0, 0, 0) = 5.0;
    x(1, 1, 0) = 2.0;
    const Tensor3 g = grad_s2(x, identity_transform(1), PenaltyParams(PenaltyKind::Mcp, 1.0, 2.0));
    CHECK(g(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(g(0, 1, 0)) <= 1e-14);
    CHECK(std::abs(g(1, 0, 0)) <= 1e-14);
  }
  SUBCASE("central finite differences") {
    std::mt19937_64 rng(32);
    const OrthogonalTransform u = dct_transform(4);
    int checked = 0;
    while (checked < 5) {
      const Tensor3 x = oracle::random_tensor({6, 5, 4}, rng, 1.5);
      if (!min_gap_at_least(x, u, 1e-4)) continue;
      for (const auto& p : all_kinds(1.0)) {
        if (p.kind() == PenaltyKind::Convex) continue;
        const Tensor3 g = grad_s2(x, u, p);
        Tensor3 fd(x.dims());
        const double h = 1e-6;
        for (Index n = 0; n < x.size(); ++n) {
          Tensor3 xp = x, xm = x;
          xp.data()[n] += h;
          xm.data()[n] -= h;
          fd.data()[n] = (s2_total(xp, u, p) - s2_total(xm, u, p)) / (2.0 * h);
        }
        CAPTURE(to_string(p.kind()));
        CHECK(oracle::rel_diff(g, fd) <= 1e-5);
      }
      ++checked;
    }
  }
}

TEST_CASE("prox_s1") {
  const PenaltyParams p(PenaltyKind::Mcp, 1.0, 2.7);
  SUBCASE("diagonal soft threshold") {
    Tensor3 a(3, 3, 1);
    a(0, 0, 0) = 3.0;
    a(1, 1, 0) = 1.0;
    a(2, 2, 0) = 0.5;
    const Tensor3 m = prox_s1(a, 1.0, identity_transform(1), p);
    Tensor3 expected(3, 3, 1);
    expected(0, 0, 0) = 2.0;
    CHECK(oracle::rel_diff(m, expected) <= 1e-15);
  }
  SUBCASE("large threshold gives zero") {
    std::mt19937_64 rng(33);
    const OrthogonalTransform u = dct_transform(3);
    const Tensor3 a = oracle::random_tensor({4, 4, 3}, rng);
    CHECK(prox_s1(a, 1.01 * spectral_norm_u(a, u), u, p) == Tensor3(4, 4, 3));
  }
  SUBCASE("matches per-slice SVT and is nonexpansive") {
    std::mt19937_64 rng(34);
    const OrthogonalTransform u = dct_transform(4);
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor3 a = oracle::random_tensor({6, 5, 4}, rng);
      const Tensor3 b = oracle::random_tensor({6, 5, 4}, rng);
      const double theta = 0.7;
      const Tensor3 m = prox_s1(a, theta, u, PenaltyParams(PenaltyKind::Convex, 1.3));
      Matrix blocks = oracle::bdiag(a, u.matrix());
      for (Index k = 0; k < 4; ++k) {
        blocks.block(k * 6, k * 5, 6, 5) = oracle::svt(blocks.block(k * 6, k * 5, 6, 5), theta * 1.3);
      }
      CHECK((m.vec() - oracle::from_bdiag(blocks, a.dims(), u.matrix()).vec()).norm() <= 1e-12);
      const Tensor3 mb = prox_s1(b, theta, u, PenaltyParams(PenaltyKind::Convex, 1.3));
      CHECK(fro_norm(m - mb) <= fro_norm(a - b) + 1e-10);
    }
  }
  SUBCASE("random probes never beat the prox objective") {
    std::mt19937_64 rng(35);
    std::normal_distribution<double> normal;
    const OrthogonalTransform u = dct_transform(4);
    const Tensor3 a = oracle::random_tensor({6, 5, 4}, rng);
    const double theta = 0.5;
    auto objective = [&](const Tensor3& m) {
      const double r = fro_norm(m - a);
      return 0.5 * r * r + theta * p.lambda() * ttnn(m, u);
    };
    const Tensor3 m = prox_s1(a, theta, u, p);
    const double best = objective(m);
    for (int probe = 0; probe < 1000; ++probe) {
      Tensor3 q = m;
      const double scale = std::pow(10.0, -3.0 + 3.0 * (probe % 4) / 3.0);
      for (double& v : q.data()) v += scale * normal(rng);
      CHECK(best <= objective(q) + 1e-8);
    }
  }
  CHECK_THROWS_AS(prox_s1(Tensor3(2, 2, 1), 0.0, identity_transform(1), p), ParameterError);
}

TEST_CASE("nuclear-norm bound and weak convexity on matrices") {
  std::mt19937_64 rng(36);
  const OrthogonalTransform id = identity_transform(1);
  for (const auto& p : all_kinds(0.7)) {
    for (int trial = 0; trial < 200; ++trial) {
      const Tensor3 x = oracle::random_tensor({4, 3, 1}, rng, 2.0);
      const Tensor3 y = oracle::random_tensor({4, 3, 1}, rng, 2.0);
      const double fx = fro_norm(x);
      CHECK(p.lambda() * p.k0() * ttnn(x, id) <= g_lambda(x, id, p) + 0.5 * p.mu() * fx * fx + 1e-8);
      auto weak = [&](const Tensor3& t) {
        const double f = fro_norm(t);
        return g_lambda(t, id, p) + 0.5 * p.mu() * f * f;
      };
      const Tensor3 mid = 0.5 * (x + y);
      CHECK(weak(mid) <= 0.5 * (weak(x) + weak(y)) + 1e-9);
    }
  }
}
