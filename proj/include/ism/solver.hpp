#pragma once

// Iterative spectral method: W <- dominant eigenvectors of Phi(W) until the
// eigenvalues settle, with a principal-angle confirmation on the last step.

#include "ism/gamma.hpp"
#include "ism/kernel.hpp"
#include "ism/phi.hpp"

#include <vector>

namespace ism {

struct DominantEigenpairs {
  Matrix vectors;  // d x q, orthonormal columns
  Vector values;   // q, descending
  /// lambda_q - lambda_{q+1}; +inf when q == d.
  double eigengap = 0.0;
};

/// Top-q eigenpairs of the symmetrized matrix. Each eigenvector is signed so
/// its largest-magnitude entry (lowest index on ties) is positive.
DominantEigenpairs dominant_eigenvectors(const Matrix& Phi, Eigen::Index q);
inline DominantEigenpairs dominant_eigenvectors(const PhiMatrix& Phi, Eigen::Index q) {
  return dominant_eigenvectors(Phi.values, q);
}

/// ||now - prev|| / ||now|| < delta. Two zero vectors count as converged.
bool eigenvalue_converged(const Vector& now, const Vector& prev, double delta);

/// Largest principal angle (radians) between span(W_a) and span(W_b).
double principal_angle(const Matrix& W_a, const Matrix& W_b);

/// Tr(Gamma K_XW) as an elementwise sum.
double objective_cost(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                      const KernelSpec& spec);

/// Euclidean gradient 2 Phi(W) W.
Matrix objective_gradient(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                          const KernelSpec& spec);

struct IterationRecord {
  double cost = 0.0;
  double eigenvalue_change = 0.0;  // ||dLambda|| / ||Lambda||
  double max_angle = 0.0;          // theta_max against the previous W
};

struct ProjectionResult {
  Matrix W;
  Vector eigenvalues;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  double eigengap = 0.0;
  /// theta_max between the final two iterates.
  double final_angle = 0.0;
  std::vector<IterationRecord> history;
};

struct IsmOptions {
  double delta = 0.01;
  int max_iter = 50;
  /// Eigenvalue convergence is accepted only if the subspace also moved
  /// less than this many radians; otherwise iteration continues.
  double angle_tolerance = 0.05;
};

ProjectionResult ism_solve(const DataMatrix& X, const GammaMatrix& Gamma, const KernelSpec& spec,
                           Eigen::Index q, const IsmOptions& options = {});

/// ||W^T W - I||_F.
double orthonormality_error(const Matrix& W);

}  // namespace ism
