#include <doctest.h>

#include "ism/baseline.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace ism;
using namespace ism::testing;

TEST_CASE("riemannian gradient") {
  const Matrix W = orthonormal_frame(5, 2, 1);
  CHECK(riemannian_gradient(W, W).norm() < 1e-14);
  Matrix G = gaussian_matrix(5, 2, 2);
  G -= W * (W.transpose() * G);  // orthogonal to span(W)
  CHECK((riemannian_gradient(W, G) - G).norm() < 1e-12);
  CHECK_THROWS(riemannian_gradient(W, Matrix::Ones(5, 3)));
}

TEST_CASE("retraction") {
  const Matrix W = orthonormal_frame(5, 2, 3);
  const Matrix R = retract(W);
  for (Eigen::Index c = 0; c < 2; ++c) {
    const double s = R.col(c).dot(W.col(c)) > 0 ? 1.0 : -1.0;
    CHECK((s * R.col(c) - W.col(c)).norm() < 1e-12);
  }
  Matrix M(3, 2);
  M << 2, 0, 0, 3, 0, 0;
  const Matrix Q = retract(M);
  CHECK(Q.col(0).isApprox(Vector::Unit(3, 0)));
  CHECK(Q.col(1).isApprox(Vector::Unit(3, 1)));
  Matrix deficient(3, 2);
  deficient << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS(retract(deficient));
}

TEST_CASE("random frames are orthonormal and seeded") {
  const Matrix a = random_stiefel(7, 3, 5);
  CHECK(orthonormality_error(a) < 1e-12);
  CHECK(a == random_stiefel(7, 3, 5));
  CHECK(a != random_stiefel(7, 3, 6));
}

TEST_CASE("ascent with a zero coupling returns its start") {
  const Matrix X = gaussian_matrix(8, 4, 7);
  const ProjectionResult r =
      stiefel_ascent(X, GammaMatrix::raw(Matrix::Zero(8, 8)), KernelSpec::gaussian(1.0), 2, {}, 9);
  CHECK(r.cost == 0.0);
  CHECK(r.W == random_stiefel(4, 2, 9));
}

TEST_CASE("ascent never lowers the cost and reaches the Ky Fan bound for linear kernels") {
  const Matrix X = gaussian_matrix(25, 6, 11);
  const Matrix Gv = random_psd(25, 12);
  const GammaMatrix G = GammaMatrix::raw(Gv);
  const ProjectionResult r = stiefel_ascent(X, G, KernelSpec::linear(), 2, {}, 3);
  const double start = objective_cost(X, random_stiefel(6, 2, 3), G, KernelSpec::linear());
  CHECK(r.cost >= start);
  CHECK(r.cost == doctest::Approx(top_eigen_sum(X.transpose() * Gv * X, 2)).epsilon(1e-6));
  CHECK(orthonormality_error(r.W) < 1e-10);
}

TEST_CASE("finite-difference gradient") {
  const Matrix X = gaussian_matrix(6, 3, 20);
  const Matrix W = orthonormal_frame(3, 2, 21);
  CHECK(finite_difference_gradient(X, W, GammaMatrix::raw(Matrix::Zero(6, 6)), KernelSpec::gaussian(1.0)).norm() == 0.0);
  const GammaMatrix G = GammaMatrix::raw(random_symmetric(6, 22));
  const Matrix fd = finite_difference_gradient(X, W, G, KernelSpec::polynomial(2, 1.0));
  const Matrix exact = objective_gradient(X, W, G, KernelSpec::polynomial(2, 1.0));
  CHECK((fd - exact).norm() <= 1e-6 * exact.norm());
  CHECK_THROWS(finite_difference_gradient(X, W, G, KernelSpec::linear(), 1.0));
}

TEST_CASE("baseline configuration checks") {
  CHECK_THROWS(validate(BaselineConfig{.step = 0.0}));
  CHECK_THROWS(validate(BaselineConfig{.backtrack = 1.0}));
  CHECK_THROWS(validate(BaselineConfig{.iters = -1}));
  CHECK_NOTHROW(validate(BaselineConfig{}));
}
