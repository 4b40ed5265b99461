#include "ism/baseline.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <stdexcept>

namespace ism {

void validate(const BaselineConfig& config) {
  if (!(config.step > 0.0)) throw std::invalid_argument("baseline step must be positive");
  if (!(config.backtrack > 0.0 && config.backtrack < 1.0)) {
    throw std::invalid_argument("baseline backtrack factor must lie in (0, 1)");
  }
  if (config.iters < 0) throw std::invalid_argument("baseline iteration count must be >= 0");
  if (!(config.tol >= 0.0)) throw std::invalid_argument("baseline tolerance must be >= 0");
}

Matrix riemannian_gradient(const Matrix& W, const Matrix& G) {
  if (W.rows() != G.rows() || W.cols() != G.cols()) {
    throw std::invalid_argument("riemannian_gradient needs W and G of equal shape");
  }
  const Matrix WtG = W.transpose() * G;
  return G - W * (0.5 * (WtG + WtG.transpose()));
}

Matrix retract(const Matrix& M) {
  if (M.cols() > M.rows()) throw std::invalid_argument("retract needs at least as many rows as columns");
  Eigen::HouseholderQR<Matrix> qr(M);
  const auto q = M.cols();
  const Matrix R = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < q; ++k) {
    if (!(std::abs(R(k, k)) > 1e-12 * scale)) throw std::invalid_argument("retract: matrix is rank deficient");
  }
  Matrix Q = qr.householderQ() * Matrix::Identity(M.rows(), q);
  for (Eigen::Index k = 0; k < q; ++k) {
    if (R(k, k) < 0.0) Q.col(k) = -Q.col(k);
  }
  return Q;
}

Matrix random_stiefel(Eigen::Index d, Eigen::Index q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix M(d, q);
  for (Eigen::Index c = 0; c < q; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) M(r, c) = normal(rng);
  }
  return retract(M);
}

ProjectionResult stiefel_ascent(const DataMatrix& X, const GammaMatrix& Gamma, const KernelSpec& spec,
                                Eigen::Index q, const BaselineConfig& config, std::uint64_t seed) {
  validate(config);
  if (q < 1 || q > X.cols()) {
    throw std::invalid_argument("subspace dimension q=" + std::to_string(q) +
                                " must lie in [1, d=" + std::to_string(X.cols()) + "]");
  }
  if (Gamma.size() != X.rows()) throw std::invalid_argument("Gamma size does not match X");
  const KernelSpec kernel = resolve(spec, X);
  validate(kernel);

  auto cost_at = [&](const Matrix& W) {
    const double c = objective_cost(X, W, Gamma, kernel);
    if (!std::isfinite(c)) throw std::runtime_error("baseline objective is not finite");
    return c;
  };

  Matrix W = random_stiefel(X.cols(), q, seed);
  double cost = cost_at(W);
  double step = config.step;

  ProjectionResult result;
  result.history.push_back({cost, 0.0, 0.0});
  for (int it = 0; it < config.iters; ++it) {
    const Matrix R = riemannian_gradient(W, objective_gradient(X, W, Gamma, kernel));
    const double grad_norm = R.norm();
    if (grad_norm < config.tol) {
      result.converged = true;
      break;
    }
    bool accepted = false;
    double eta = step;
    for (int trial = 0; trial <= 30; ++trial, eta *= config.backtrack) {
      const Matrix candidate = retract(W + eta * R);
      const double candidate_cost = cost_at(candidate);
      if (candidate_cost > cost) {
        result.history.push_back({candidate_cost, 0.0, principal_angle(W, candidate)});
        W = candidate;
        cost = candidate_cost;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent along R at any tried step length: numerically stationary.
      result.converged = true;
      break;
    }
    ++result.iterations;
    // Let the step grow back after an easy acceptance.
    step = std::min(config.step * 1e6, eta * 2.0);
  }

  // Ascent is strict, so the last accepted iterate is also the best one.
  result.W = W;
  result.cost = cost;
  const PhiMatrix Phi = phi(X, W, Gamma, kernel);
  const Matrix sym = 0.5 * (Phi.values + Phi.values.transpose());
  result.eigenvalues = (W.transpose() * sym * W).diagonal();
  result.eigengap = dominant_eigenvectors(sym, q).eigengap;
  result.final_angle = result.history.back().max_angle;
  return result;
}

Matrix finite_difference_gradient(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                                  const KernelSpec& spec, double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) throw std::invalid_argument("finite difference step must lie in [1e-7, 1e-3]");
  const KernelSpec kernel = resolve(spec, X);
  Matrix G(W.rows(), W.cols());
  Matrix probe = W;
  for (Eigen::Index c = 0; c < W.cols(); ++c) {
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      probe(r, c) = W(r, c) + h;
      const double up = objective_cost(X, probe, Gamma, kernel);
      probe(r, c) = W(r, c) - h;
      const double down = objective_cost(X, probe, Gamma, kernel);
      probe(r, c) = W(r, c);
      G(r, c) = (up - down) / (2.0 * h);
    }
  }
  return G;
}

}  // namespace ism
