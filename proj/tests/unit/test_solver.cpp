#include <doctest.h>

#include "ism/solver.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

#include <cmath>
#include <numbers>

using namespace ism;
using namespace ism::testing;

TEST_CASE("dominant eigenvectors of a diagonal matrix") {
  Matrix P = Matrix::Zero(3, 3);
  P.diagonal() << 3, 1, 2;
  const auto e = dominant_eigenvectors(P, 2);
  CHECK(e.values(0) == doctest::Approx(3.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.vectors.col(0).isApprox(Vector::Unit(3, 0)));
  CHECK(e.vectors.col(1).isApprox(Vector::Unit(3, 2)));
  CHECK(e.eigengap == doctest::Approx(1.0));
}

TEST_CASE("dominant eigenvector of a negative Laplacian") {
  Matrix P(2, 2);
  P << -1, 1, 1, -1;
  const auto e = dominant_eigenvectors(P, 1);
  CHECK(e.values(0) == doctest::Approx(0.0).scale(1.0));
  CHECK(e.vectors(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(e.vectors(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("degenerate spectrum is deterministic") {
  const auto a = dominant_eigenvectors(Matrix::Identity(4, 4), 2);
  const auto b = dominant_eigenvectors(Matrix::Identity(4, 4), 2);
  CHECK(a.vectors == b.vectors);
  CHECK(a.values(0) == 1.0);
  CHECK(a.values(1) == 1.0);
  CHECK(orthonormality_error(a.vectors) < 1e-12);
}

TEST_CASE("sign convention makes the largest entry positive") {
  const Matrix M = random_symmetric(6, 77);
  const auto e = dominant_eigenvectors(M, 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    Eigen::Index idx;
    e.vectors.col(c).cwiseAbs().maxCoeff(&idx);
    CHECK(e.vectors(idx, c) > 0.0);
  }
  CHECK((M * e.vectors - e.vectors * e.values.asDiagonal()).norm() <= 1e-8 * M.norm());
  CHECK_THROWS(dominant_eigenvectors(M, 7));
  CHECK(std::isinf(dominant_eigenvectors(M, 6).eigengap));
}

TEST_CASE("eigenvalue convergence test") {
  Vector a(2), b(2);
  a << 1, 1;
  CHECK(eigenvalue_converged(a, a, 0.01));
  b << 2, 2;
  CHECK_FALSE(eigenvalue_converged(b, a, 0.01));
  Vector prev(2), now(2);
  prev << 1, 0;
  now << 1, 0.005;
  CHECK(eigenvalue_converged(now, prev, 0.01));
  CHECK(eigenvalue_converged(Vector::Zero(3), Vector::Zero(3), 0.01));
}

TEST_CASE("principal angles") {
  const Matrix W = orthonormal_frame(5, 2, 3);
  CHECK(principal_angle(W, W) == doctest::Approx(0.0).scale(1.0));
  const double t = 0.7;
  Matrix R(2, 2);
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  CHECK(principal_angle(W, W * R) <= 1e-8);
  CHECK(principal_angle(Matrix(Vector::Unit(3, 0)), Matrix(Vector::Unit(3, 1))) ==
        doctest::Approx(std::numbers::pi / 2));
  Matrix tilted(2, 1);
  tilted << std::cos(0.3), std::sin(0.3);
  CHECK(principal_angle(Matrix(Vector::Unit(2, 0)), tilted) == doctest::Approx(0.3));
}

TEST_CASE("objective cost") {
  const Matrix X = gaussian_matrix(5, 3, 8);
  const Matrix W = orthonormal_frame(3, 2, 9);
  CHECK(objective_cost(X, W, GammaMatrix::raw(Matrix::Zero(5, 5)), KernelSpec::gaussian(1.0)) == 0.0);
  CHECK(objective_cost(X, W, GammaMatrix::raw(Matrix::Identity(5, 5)), KernelSpec::gaussian(1.0)) ==
        doctest::Approx(5.0));
  const Matrix small = gaussian_matrix(3, 2, 10);
  const Matrix G = random_symmetric(3, 11);
  const Matrix w = orthonormal_frame(2, 1, 12);
  const double dense = (G * small * w * w.transpose() * small.transpose()).trace();
  CHECK(objective_cost(small, w, GammaMatrix::raw(G), KernelSpec::linear()) == doctest::Approx(dense));
}

TEST_CASE("gradient matches finite differences of the cost") {
  const Matrix X = gaussian_matrix(8, 4, 40);
  const Matrix W = orthonormal_frame(4, 2, 41);
  const GammaMatrix G = GammaMatrix::raw(random_symmetric(8, 42));
  CHECK(objective_gradient(X, W, GammaMatrix::raw(Matrix::Zero(8, 8)), KernelSpec::gaussian(1.0)).norm() == 0.0);
  for (const auto& spec : {KernelSpec::gaussian(1.2), KernelSpec::polynomial(2, 1.0), KernelSpec::multiquadratic(1.0)}) {
    const Matrix g = objective_gradient(X, W, G, spec);
    const double h = 1e-5;
    for (Eigen::Index r = 0; r < 4; ++r) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        Matrix Wp = W, Wm = W;
        Wp(r, c) += h;
        Wm(r, c) -= h;
        const double fd = (objective_cost(X, Wp, G, spec) - objective_cost(X, Wm, G, spec)) / (2 * h);
        CHECK(g(r, c) == doctest::Approx(fd).epsilon(1e-5).scale(g.norm()));
      }
    }
  }
}

TEST_CASE("linear kernel converges in one step to the Ky Fan optimum") {
  const Matrix X = gaussian_matrix(20, 5, 50);
  const Matrix Gv = random_psd(20, 51);
  const GammaMatrix G = GammaMatrix::raw(Gv);
  const ProjectionResult r = ism_solve(X, G, KernelSpec::linear(), 2);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  const double ky_fan = top_eigen_sum(X.transpose() * Gv * X, 2);
  CHECK(r.cost == doctest::Approx(ky_fan).epsilon(1e-10));
  const ProjectionResult s = ism_solve(X, G, KernelSpec::squared(), 2);
  CHECK(s.converged);
  CHECK(s.iterations == 1);
}

TEST_CASE("converged runs are stationary and feasible") {
  const auto data = three_blobs(3);
  const GammaMatrix G = gamma_supervised(data.labels);
  const KernelSpec spec = resolve(KernelSpec::gaussian_median(), data.X);
  IsmOptions opt;
  opt.max_iter = 200;
  opt.angle_tolerance = 1e-8;
  const ProjectionResult r = ism_solve(data.X, G, spec, 2, opt);
  REQUIRE(r.converged);
  const Matrix P = phi(data.X, r.W, G, spec).values;
  const Matrix residual = P * r.W - r.W * r.eigenvalues.asDiagonal();
  CHECK(residual.norm() <= 1e-6 * P.norm());
  CHECK(orthonormality_error(r.W) <= 1e-8);
  CHECK(r.final_angle <= 0.05);
  // Gradient lies in span(W) at the fixed point.
  const Matrix g = objective_gradient(data.X, r.W, G, spec);
  CHECK((g - r.W * (r.W.transpose() * g)).norm() <= 1e-6 * g.norm());
  CHECK(static_cast<int>(r.history.size()) == r.iterations);
}

TEST_CASE("Rayleigh quotient never exceeds the top eigenvalue sum") {
  const Matrix P = random_symmetric(6, 91);
  const double bound = top_eigen_sum(P, 2);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Matrix W = orthonormal_frame(6, 2, 1000 + s);
    CHECK((W.transpose() * P * W).trace() <= bound + 1e-8);
  }
}

TEST_CASE("iteration cap yields an unconverged result") {
  const auto data = three_blobs(5);
  IsmOptions opt;
  opt.delta = 1e-300;
  opt.max_iter = 2;
  const ProjectionResult r =
      ism_solve(data.X, gamma_supervised(data.labels), resolve(KernelSpec::gaussian_median(), data.X), 2, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}

TEST_CASE("solver is deterministic") {
  const auto data = three_blobs(6);
  const GammaMatrix G = gamma_supervised(data.labels);
  const KernelSpec spec = resolve(KernelSpec::gaussian_median(), data.X);
  const ProjectionResult a = ism_solve(data.X, G, spec, 2);
  const ProjectionResult b = ism_solve(data.X, G, spec, 2);
  CHECK(a.W == b.W);
  CHECK(a.cost == b.cost);
  CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_CASE("solver argument checks") {
  const Matrix X = gaussian_matrix(5, 3, 1);
  const GammaMatrix G = GammaMatrix::raw(random_symmetric(5, 2));
  CHECK_THROWS(ism_solve(X, G, KernelSpec::linear(), 0));
  CHECK_THROWS(ism_solve(X, G, KernelSpec::linear(), 4));
  CHECK_THROWS(ism_solve(X, GammaMatrix::raw(Matrix::Zero(4, 4)), KernelSpec::linear(), 2));
  IsmOptions bad;
  bad.delta = 0.0;
  CHECK_THROWS(ism_solve(X, G, KernelSpec::linear(), 2, bad));
}
