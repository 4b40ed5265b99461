#pragma once

// Coupling matrices for Tr(Gamma K_XW) under each learning paradigm.

#include "ism/kernel.hpp"
#include "ism/types.hpp"

#include <optional>

namespace ism {

enum class GammaProvenance { Supervised, Unsupervised, SemiSupervised, Alternative, Raw };

struct GammaMatrix {
  Matrix values;
  GammaProvenance provenance = GammaProvenance::Raw;

  /// Wraps a caller-supplied matrix, symmetrizing it.
  static GammaMatrix raw(const Matrix& values);

  Eigen::Index size() const { return values.rows(); }
};

/// H = I - (1/n) 1 1^T.
Matrix centering_matrix(Eigen::Index n);

/// H K H without forming H.
Matrix double_center(const Matrix& K);

/// Tr(K_X H K_Y H) / (n-1)^2.
double hsic(const Matrix& K_X, const Matrix& K_Y);

/// Row-wise one-hot encoding with as many columns as the largest id + 1.
Matrix one_hot(const Labels& labels);

/// K_Y[i][j] = 1 when labels agree.
Matrix delta_kernel(const Labels& labels);

/// Gamma = H K_Y H with K_Y the delta kernel, or `label_kernel` when given.
GammaMatrix gamma_supervised(const Labels& labels);
GammaMatrix gamma_supervised(const Matrix& label_kernel);

/// Gamma = H Y Y^T H.
GammaMatrix gamma_unsupervised(const Matrix& Y_embed);

/// Omega = D^{-1/2} Y Y^T D^{-1/2} with D = diag(K_XW 1).
Matrix spectral_coupling(const Matrix& K_XW, const Matrix& Y_embed);

/// Gamma = Omega + mu H K_hatY H.
GammaMatrix gamma_semisupervised(const Matrix& K_XW, const Matrix& Y_embed,
                                 const Matrix& K_hatY, double mu);

/// Gamma = Omega - mu H K_hatY H.
GammaMatrix gamma_alternative(const Matrix& K_XW, const Matrix& Y_embed,
                              const Matrix& K_hatY, double mu);

}  // namespace ism
