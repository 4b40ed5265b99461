#include "ism/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ism {

namespace {

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

void require_square(const Matrix& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(what) + " must be square");
  }
}

Vector inverse_sqrt_degrees(const Matrix& K_XW) {
  const Vector degrees = K_XW.rowwise().sum();
  Vector out(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    if (!(degrees(i) > 0.0) || !std::isfinite(degrees(i))) {
      throw std::invalid_argument("degenerate degree matrix: row " + std::to_string(i) +
                                  " has degree " + std::to_string(degrees(i)));
    }
    out(i) = 1.0 / std::sqrt(degrees(i));
  }
  return out;
}

GammaMatrix coupled(const Matrix& K_XW, const Matrix& Y_embed, const Matrix& K_hatY,
                    double signed_mu, GammaProvenance provenance) {
  require_square(K_hatY, "K_hatY");
  if (K_hatY.rows() != K_XW.rows()) throw std::invalid_argument("K_hatY size does not match K_XW");
  Matrix values = spectral_coupling(K_XW, Y_embed);
  if (signed_mu != 0.0) values += signed_mu * double_center(K_hatY);
  return {symmetrized(values), provenance};
}

}  // namespace

GammaMatrix GammaMatrix::raw(const Matrix& values) {
  require_square(values, "Gamma");
  if (!values.allFinite()) throw std::invalid_argument("Gamma has non-finite entries");
  return {symmetrized(values), GammaProvenance::Raw};
}

Matrix centering_matrix(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("centering matrix needs n >= 1");
  Matrix H = Matrix::Constant(n, n, -1.0 / static_cast<double>(n));
  H.diagonal().array() += 1.0;
  return H;
}

Matrix double_center(const Matrix& K) {
  require_square(K, "kernel matrix");
  const Vector col_means = K.colwise().mean().transpose();
  const Vector row_means = K.rowwise().mean();
  const double grand = col_means.mean();
  Matrix out = K;
  out.colwise() -= row_means;
  out.rowwise() -= col_means.transpose();
  out.array() += grand;
  return out;
}

double hsic(const Matrix& K_X, const Matrix& K_Y) {
  require_square(K_X, "K_X");
  require_square(K_Y, "K_Y");
  if (K_X.rows() != K_Y.rows()) throw std::invalid_argument("HSIC kernel sizes differ");
  const auto n = K_X.rows();
  if (n < 2) throw std::invalid_argument("HSIC needs at least two samples");
  // Tr(K_X H K_Y H) = sum_ij (H K_X H)_ij (K_Y)_ij for symmetric K_Y.
  const double trace = double_center(K_X).cwiseProduct(K_Y.transpose()).sum();
  const double denom = static_cast<double>(n - 1);
  return trace / (denom * denom);
}

Matrix one_hot(const Labels& labels) {
  if (labels.empty()) throw std::invalid_argument("label vector is empty");
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;
  Matrix Y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw std::invalid_argument("labels must be non-negative");
    Y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return Y;
}

Matrix delta_kernel(const Labels& labels) {
  const Matrix Y = one_hot(labels);
  return Y * Y.transpose();
}

GammaMatrix gamma_supervised(const Labels& labels) {
  if (labels.size() < 2) throw std::invalid_argument("supervised coupling needs at least two labels");
  return {symmetrized(double_center(delta_kernel(labels))), GammaProvenance::Supervised};
}

GammaMatrix gamma_supervised(const Matrix& label_kernel) {
  require_square(label_kernel, "label kernel");
  if (label_kernel.rows() < 2) throw std::invalid_argument("supervised coupling needs n >= 2");
  return {symmetrized(double_center(label_kernel)), GammaProvenance::Supervised};
}

GammaMatrix gamma_unsupervised(const Matrix& Y_embed) {
  if (Y_embed.cols() < 1) throw std::invalid_argument("embedding needs at least one column");
  if (!Y_embed.allFinite()) throw std::invalid_argument("embedding has non-finite entries");
  return {symmetrized(double_center(Y_embed * Y_embed.transpose())), GammaProvenance::Unsupervised};
}

Matrix spectral_coupling(const Matrix& K_XW, const Matrix& Y_embed) {
  require_square(K_XW, "K_XW");
  if (Y_embed.rows() != K_XW.rows()) throw std::invalid_argument("embedding rows do not match K_XW");
  const Vector inv_sqrt = inverse_sqrt_degrees(K_XW);
  const Matrix scaled = inv_sqrt.asDiagonal() * Y_embed;
  return scaled * scaled.transpose();
}

GammaMatrix gamma_semisupervised(const Matrix& K_XW, const Matrix& Y_embed,
                                 const Matrix& K_hatY, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  return coupled(K_XW, Y_embed, K_hatY, mu, GammaProvenance::SemiSupervised);
}

GammaMatrix gamma_alternative(const Matrix& K_XW, const Matrix& Y_embed,
                              const Matrix& K_hatY, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  return coupled(K_XW, Y_embed, K_hatY, -mu, GammaProvenance::Alternative);
}

}  // namespace ism
