#include "ism/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ism {

DominantEigenpairs dominant_eigenvectors(const Matrix& Phi, Eigen::Index q) {
  if (Phi.rows() != Phi.cols()) throw std::invalid_argument("Phi must be square");
  const auto d = Phi.rows();
  if (q < 1 || q > d) {
    throw std::invalid_argument("subspace dimension q=" + std::to_string(q) +
                                " must lie in [1, " + std::to_string(d) + "]");
  }
  if (!Phi.allFinite()) throw std::runtime_error("Phi has non-finite entries");

  const Matrix sym = 0.5 * (Phi + Phi.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  // Eigen returns ascending order.
  DominantEigenpairs out;
  out.vectors.resize(d, q);
  out.values.resize(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    const auto src = d - 1 - k;
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < d; ++r) {
      if (std::abs(v(r)) > std::abs(v(pivot))) pivot = r;
    }
    if (v(pivot) < 0.0) v = -v;
    out.vectors.col(k) = v;
    out.values(k) = solver.eigenvalues()(src);
  }
  out.eigengap = q == d ? std::numeric_limits<double>::infinity()
                        : solver.eigenvalues()(d - q) - solver.eigenvalues()(d - q - 1);
  return out;
}

bool eigenvalue_converged(const Vector& now, const Vector& prev, double delta) {
  if (now.size() != prev.size()) throw std::invalid_argument("eigenvalue vectors differ in length");
  const double scale = now.norm();
  if (scale == 0.0) return prev.norm() == 0.0;
  return (now - prev).norm() / scale < delta;
}

double principal_angle(const Matrix& W_a, const Matrix& W_b) {
  if (W_a.rows() != W_b.rows() || W_a.cols() != W_b.cols()) {
    throw std::invalid_argument("principal_angle needs equally shaped bases");
  }
  const Matrix overlap = W_a.transpose() * W_b;
  const double cos_min = std::clamp(
      Eigen::JacobiSVD<Matrix>(overlap).singularValues().minCoeff(), 0.0, 1.0);
  // For small angles the sine route avoids acos cancellation near 1.
  const Matrix residual = W_b - W_a * overlap;
  const double sin_max =
      std::clamp(Eigen::JacobiSVD<Matrix>(residual).singularValues().maxCoeff(), 0.0, 1.0);
  return sin_max < cos_min ? std::asin(sin_max) : std::acos(cos_min);
}

double objective_cost(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                      const KernelSpec& spec) {
  if (Gamma.size() != X.rows()) throw std::invalid_argument("Gamma size does not match X");
  return Gamma.values.cwiseProduct(kernel_matrix(X, W, spec)).sum();
}

Matrix objective_gradient(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                          const KernelSpec& spec) {
  return 2.0 * phi(X, W, Gamma, spec).values * W;
}

double orthonormality_error(const Matrix& W) {
  return (W.transpose() * W - Matrix::Identity(W.cols(), W.cols())).norm();
}

ProjectionResult ism_solve(const DataMatrix& X, const GammaMatrix& Gamma, const KernelSpec& spec,
                           Eigen::Index q, const IsmOptions& options) {
  if (q < 1 || q > X.cols()) {
    throw std::invalid_argument("subspace dimension q=" + std::to_string(q) +
                                " must lie in [1, d=" + std::to_string(X.cols()) + "]");
  }
  if (Gamma.size() != X.rows()) throw std::invalid_argument("Gamma size does not match X");
  if (!(options.delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

  const KernelSpec kernel = resolve(spec, X);
  validate(kernel);

  DominantEigenpairs current = dominant_eigenvectors(phi0(X, Gamma, kernel), q);

  ProjectionResult result;
  Matrix previous;
  for (int t = 1; t <= options.max_iter; ++t) {
    const PhiMatrix Phi = phi(X, current.vectors, Gamma, kernel);
    if (!Phi.values.allFinite()) throw std::runtime_error("Phi has non-finite entries");
    DominantEigenpairs next = dominant_eigenvectors(Phi, q);

    IterationRecord record;
    record.eigenvalue_change = next.values.norm() == 0.0
                                   ? (next.values - current.values).norm()
                                   : (next.values - current.values).norm() / next.values.norm();
    record.max_angle = std::numeric_limits<double>::quiet_NaN();
    record.cost = objective_cost(X, next.vectors, Gamma, kernel);

    bool done = false;
    if (eigenvalue_converged(next.values, current.values, options.delta)) {
      record.max_angle = principal_angle(current.vectors, next.vectors);
      done = record.max_angle <= options.angle_tolerance;
    }
    result.history.push_back(record);
    result.iterations = t;
    previous = std::move(current.vectors);
    current = std::move(next);
    if (done) {
      result.converged = true;
      break;
    }
  }

  result.final_angle = std::isnan(result.history.back().max_angle)
                           ? principal_angle(previous, current.vectors)
                           : result.history.back().max_angle;
  result.W = std::move(current.vectors);
  result.eigenvalues = std::move(current.values);
  result.eigengap = current.eigengap;
  result.cost = result.history.back().cost;
  return result;
}

}  // namespace ism
