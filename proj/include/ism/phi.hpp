#pragma once

// Surrogate matrices for Tr(Gamma K_XW).
//
//   Phi = 1/2 sum_ij Gamma_ij f'(beta_ij) (b a^T + a b^T)
//
// With Psi = Gamma (.) F', point-pair kernels collapse to X^T Psi X and
// difference-pair kernels to 2 X^T (D_Psi - Psi) X. Exact constants are
// kept, so the Euclidean gradient of the objective is 2 Phi W.

#include "ism/gamma.hpp"
#include "ism/kernel.hpp"

#include <vector>

namespace ism {

struct PhiMatrix {
  Matrix values;
  /// False for the W-independent initializer.
  bool derived_from_W = true;
};

Matrix degree_matrix(const Matrix& Psi);

/// D_Psi - Psi.
Matrix laplacian(const Matrix& Psi);

PhiMatrix phi(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma, const KernelSpec& spec);

/// Literal double sum; O(n^2 d^2). Refuses n > 200.
PhiMatrix phi_bruteforce(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                         const KernelSpec& spec);

/// W-independent initializer from the expansion around beta = 0:
/// sign(f'(0)) X^T Gamma X for point pairs, sign(f'(0)) 2 X^T (D_Gamma - Gamma) X
/// for difference pairs. The relative RBF uses Gamma_ij / (sigma_i sigma_j)
/// in place of Gamma.
PhiMatrix phi0(const DataMatrix& X, const GammaMatrix& Gamma, const KernelSpec& spec);

struct WeightedPhi {
  double weight;
  PhiMatrix phi;
};

/// sum_k mu_k Phi_k in the given order.
PhiMatrix phi_conic(const std::vector<WeightedPhi>& parts);

}  // namespace ism
