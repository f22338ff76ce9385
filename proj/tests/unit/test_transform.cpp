#include "oracle.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/transform.hpp"
#include "tlearn/tsvd.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace tlearn;

TEST_CASE("identity transform") {
  CHECK(identity_transform(1).matrix() == Matrix::Identity(1, 1));
  CHECK(identity_transform(3).matrix() == Matrix::Identity(3, 3));
  std::mt19937_64 rng(10);
  const Tensor3 x = oracle::random_tensor({3, 2, 3}, rng);
  CHECK(apply_transform(x, identity_transform(3)) == x);
  CHECK(inverse_transform(x, identity_transform(3)) == x);
}

TEST_CASE("orthonormal DCT-II") {
  CHECK(dct_transform(1).matrix()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  // Two-point values, frozen from the closed form.
  const Matrix c2 = dct_transform(2).matrix();
  CHECK(c2(0, 0) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(c2(0, 1) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(c2(1, 0) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(c2(1, 1) == doctest::Approx(-0.70710678).epsilon(1e-8));

  const Matrix c8 = dct_transform(8).matrix();
  CHECK((c8 * c8.transpose() - Matrix::Identity(8, 8)).norm() <= 1e-12);
  for (Index n : {3, 5, 10, 16}) {
    CHECK(oracle::rel_diff(dct_transform(n).matrix(), oracle::dct_reference(n)) <= 1e-14);
  }

  // Constant tubes (1, 1) map to (sqrt 2, 0).
  const Tensor3 ones = Tensor3::constant({2, 3, 2}, 1.0);
  const Tensor3 hat = apply_transform(ones, dct_transform(2));
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 2; ++i) {
      CHECK(hat(i, j, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
      CHECK(std::abs(hat(i, j, 1)) <= 1e-15);
    }
}

TEST_CASE("transform isometry and inverse pair") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d = oracle::random_dims(rng, 6, 6, 7);
    const Tensor3 x = oracle::random_tensor(d, rng);
    const OrthogonalTransform us[] = {identity_transform(d.n3), dct_transform(d.n3),
                                      OrthogonalTransform(oracle::random_orthogonal(d.n3, rng))};
    for (const auto& u : us) {
      const Tensor3 hat = apply_transform(x, u);
      CHECK(std::abs(fro_norm(hat) - fro_norm(x)) <= 1e-12 * fro_norm(x));
      CHECK(oracle::rel_diff(inverse_transform(hat, u), x) <= 1e-14);
      for (Index k = 0; k < d.n3; ++k) {
        CHECK(oracle::rel_diff(Matrix(hat.slice(k)), oracle::transformed_slice(x, u.matrix(), k)) <=
              1e-12);
      }
    }
  }
  CHECK(inverse_transform(Tensor3(2, 2, 3), dct_transform(3)) == Tensor3(2, 2, 3));
  CHECK_THROWS_AS(apply_transform(Tensor3(2, 2, 3), dct_transform(4)), DimensionError);
}

TEST_CASE("orthogonality validation") {
  CHECK(validate_orthogonal(Matrix::Identity(4, 4)));
  CHECK(validate_orthogonal(dct_transform(16).matrix()));
  CHECK_FALSE(validate_orthogonal(Matrix::Ones(2, 2)));
  CHECK_THROWS_AS(OrthogonalTransform(Matrix::Ones(2, 2)), ParameterError);
  CHECK_THROWS_AS(OrthogonalTransform(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("data-driven transform") {
  SUBCASE("n3 = 1") {
    const Tensor3 pilot(Dims{2, 2, 1}, {-1, 2, 3, -4});
    CHECK(data_driven_transform(pilot).matrix()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("zero pilot") {
    CHECK_THROWS_AS(data_driven_transform(Tensor3(2, 2, 3)), DegenerateInputError);
  }
  SUBCASE("orthogonal rows scaled: signed permutation") {
    // One nonzero per slice at distinct positions: unfold3 has orthogonal
    // rows with norms 1, 5, 3.
    Tensor3 pilot(2, 2, 3);
    pilot(0, 0, 0) = 1.0;
    pilot(1, 0, 1) = -5.0;
    pilot(0, 1, 2) = 3.0;
    const Matrix u = data_driven_transform(pilot).matrix();
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 1) = 1.0;
    expected(1, 2) = 1.0;
    expected(2, 0) = 1.0;
    CHECK((u - expected).norm() <= 1e-12);
  }
  SUBCASE("rows diagonalize the mode-3 Gram matrix") {
    std::mt19937_64 rng(12);
    const Tensor3 pilot = oracle::random_tensor({6, 5, 4}, rng);
    const OrthogonalTransform t = data_driven_transform(pilot);
    CHECK(validate_orthogonal(t.matrix()));
    const Matrix gram = unfold3(pilot) * unfold3(pilot).transpose();
    const Matrix d = t.matrix() * gram * t.matrix().transpose();
    const Matrix off = d - Matrix(d.diagonal().asDiagonal());
    CHECK(off.norm() <= 1e-8 * gram.norm());
    for (Index k = 0; k + 1 < 4; ++k) CHECK(d(k, k) >= d(k + 1, k + 1));
    // Sign convention: largest-magnitude entry of every row is nonnegative.
    for (Index r = 0; r < 4; ++r) {
      Index arg = 0;
      t.matrix().row(r).cwiseAbs().maxCoeff(&arg);
      CHECK(t.matrix()(r, arg) >= 0.0);
    }
    // Deterministic and independent of the pilot's sign.
    CHECK(data_driven_transform(pilot).matrix() == t.matrix());
    CHECK((data_driven_transform(-1.0 * pilot).matrix() - t.matrix()).norm() <= 1e-12);
  }
  SUBCASE("rank-deficient pilot still yields a full orthogonal basis") {
    Tensor3 pilot(3, 3, 5);
    pilot.slice(0).setConstant(1.0);
    pilot.slice(2).setConstant(2.0);
    CHECK(validate_orthogonal(data_driven_transform(pilot).matrix()));
  }
}
