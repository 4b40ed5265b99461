#pragma once

// Projected-gradient ascent on the Stiefel manifold. Serves as an
// independent comparator for ism_solve on the same objective.

#include "ism/gamma.hpp"
#include "ism/kernel.hpp"
#include "ism/solver.hpp"

#include <cstdint>

namespace ism {

struct BaselineConfig {
  double step = 1.0;
  int iters = 500;
  /// Multiplier applied to the step on each rejected trial.
  double backtrack = 0.5;
  double tol = 1e-8;
};

void validate(const BaselineConfig& config);

/// G - W sym(W^T G).
Matrix riemannian_gradient(const Matrix& W, const Matrix& G);

/// Q factor of a thin QR with the diagonal of R made positive.
Matrix retract(const Matrix& M);

/// Uniformly random d x q orthonormal frame.
Matrix random_stiefel(Eigen::Index d, Eigen::Index q, std::uint64_t seed);

/// Starts from random_stiefel(seed) and returns the best iterate seen.
/// `iterations` counts accepted steps.
ProjectionResult stiefel_ascent(const DataMatrix& X, const GammaMatrix& Gamma, const KernelSpec& spec,
                                Eigen::Index q, const BaselineConfig& config = {}, std::uint64_t seed = 0);

/// Central differences of objective_cost, entry by entry, without any
/// manifold projection.
Matrix finite_difference_gradient(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                                  const KernelSpec& spec, double h = 1e-5);

}  // namespace ism
