#include "ism/phi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ism {

namespace {

constexpr Eigen::Index kBruteforceLimit = 200;

void check_shapes(const DataMatrix& X, const GammaMatrix& Gamma) {
  if (Gamma.size() != X.rows()) {
    throw std::invalid_argument("Gamma is " + std::to_string(Gamma.size()) + "x" +
                                std::to_string(Gamma.size()) + " but X has " +
                                std::to_string(X.rows()) + " rows");
  }
}

void check_relative(const KernelSpec& spec, Eigen::Index n) {
  if (spec.kind == KernelKind::RelativeRBF &&
      spec.per_sample_sigmas.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("relative RBF kernel requires per-sample bandwidths for every row");
  }
}

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

// In-place 0.5 (M + M^T), tile by tile.
void symmetrize_in_place(Matrix& M) {
  constexpr Eigen::Index kTile = 64;
  const auto n = M.rows();
  for (Eigen::Index jb = 0; jb < n; jb += kTile) {
    for (Eigen::Index ib = jb; ib < n; ib += kTile) {
      const auto i_end = std::min(ib + kTile, n);
      const auto j_end = std::min(jb + kTile, n);
      for (Eigen::Index j = jb; j < j_end; ++j) {
        for (Eigen::Index i = std::max(ib, j + 1); i < i_end; ++i) {
          const double avg = 0.5 * (M(i, j) + M(j, i));
          M(i, j) = avg;
          M(j, i) = avg;
        }
      }
    }
  }
}

// X^T Psi X for point pairs, 2 X^T (D_Psi - Psi) X for difference pairs.
// Consumes Psi to avoid n x n copies.
Matrix contract(const DataMatrix& X, Matrix Psi, PairKind kind) {
  symmetrize_in_place(Psi);
  if (kind == PairKind::PointPair) return symmetrized(X.transpose() * (Psi * X));
  const Vector degrees = Psi.rowwise().sum();
  Psi = -Psi;
  Psi.diagonal() += degrees;
  return symmetrized(2.0 * (X.transpose() * (Psi * X)));
}

PhiMatrix conic_sum(const KernelSpec& spec, auto&& per_part) {
  std::vector<WeightedPhi> parts;
  parts.reserve(spec.parts.size());
  for (const auto& t : spec.parts) parts.push_back({t.weight, per_part(t.kernel)});
  return phi_conic(parts);
}

}  // namespace

Matrix degree_matrix(const Matrix& Psi) {
  if (Psi.rows() != Psi.cols()) throw std::invalid_argument("degree matrix needs a square input");
  return Psi.rowwise().sum().asDiagonal();
}

Matrix laplacian(const Matrix& Psi) {
  if (Psi.rows() != Psi.cols()) throw std::invalid_argument("laplacian needs a square input");
  Matrix L = -Psi;
  L.diagonal() += Psi.rowwise().sum();
  return L;
}

PhiMatrix phi(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma, const KernelSpec& spec) {
  check_shapes(X, Gamma);
  if (spec.is_conic()) {
    return conic_sum(spec, [&](const KernelSpec& part) { return phi(X, W, Gamma, part); });
  }
  check_relative(spec, X.rows());
  Matrix Psi = kernel_derivative_matrix(X, W, spec);
  Psi.array() *= Gamma.values.array();
  return {contract(X, std::move(Psi), spec.pair_kind()), true};
}

PhiMatrix phi_bruteforce(const DataMatrix& X, const Matrix& W, const GammaMatrix& Gamma,
                         const KernelSpec& spec) {
  check_shapes(X, Gamma);
  if (X.rows() > kBruteforceLimit) {
    throw std::invalid_argument("phi_bruteforce is limited to n <= 200 samples");
  }
  if (W.rows() != X.cols()) throw std::invalid_argument("dimension mismatch between X and W");
  if (spec.is_conic()) {
    return conic_sum(spec, [&](const KernelSpec& part) { return phi_bruteforce(X, W, Gamma, part); });
  }
  check_relative(spec, X.rows());
  if (!spec.resolved()) throw std::invalid_argument("kernel has unresolved data-dependent parameters");

  const auto d = X.cols();
  const Matrix WWt = W * W.transpose();
  Matrix total = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
      Vector a, b;
      if (spec.pair_kind() == PairKind::PointPair) {
        a = X.row(i).transpose();
        b = X.row(j).transpose();
      } else {
        a = (X.row(i) - X.row(j)).transpose();
        b = a;
      }
      const double beta = a.dot(WWt * b);
      const double weight =
          0.5 * Gamma.values(i, j) *
          f_beta_prime(spec, beta, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      total += weight * (b * a.transpose() + a * b.transpose());
    }
  }
  return {total, true};
}

PhiMatrix phi0(const DataMatrix& X, const GammaMatrix& Gamma, const KernelSpec& spec) {
  check_shapes(X, Gamma);
  if (spec.is_conic()) {
    return conic_sum(spec, [&](const KernelSpec& part) { return phi0(X, Gamma, part); });
  }
  check_relative(spec, X.rows());
  if (!spec.resolved()) throw std::invalid_argument("kernel has unresolved data-dependent parameters");

  if (spec.kind == KernelKind::RelativeRBF) {
    const Vector inv(Eigen::Map<const Vector>(spec.per_sample_sigmas.data(),
                                              static_cast<Eigen::Index>(spec.per_sample_sigmas.size()))
                         .cwiseInverse());
    const Matrix Psi = Gamma.values.cwiseProduct(inv * inv.transpose());
    return {-contract(X, Psi, PairKind::DifferencePair), false};
  }

  // Zero slope (e.g. polynomial with c = 0) keeps the positive orientation.
  // Difference pairs keep the factor 2 used by phi(), so W-free kernels
  // start on the eigenvalues of their own Phi.
  const double slope = f_beta_prime(spec, 0.0);
  const double sign = slope < 0.0 ? -1.0 : 1.0;
  return {sign * contract(X, Gamma.values, spec.pair_kind()), false};
}

PhiMatrix phi_conic(const std::vector<WeightedPhi>& parts) {
  if (parts.empty()) throw std::invalid_argument("phi_conic needs at least one part");
  const auto d = parts.front().phi.values.rows();
  Matrix total = Matrix::Zero(d, d);
  bool from_w = false;
  for (const auto& part : parts) {
    if (part.phi.values.rows() != d || part.phi.values.cols() != d) {
      throw std::invalid_argument("phi_conic parts have mismatched dimensions");
    }
    if (!(part.weight > 0.0)) throw std::invalid_argument("phi_conic weights must be positive");
    total += part.weight * part.phi.values;
    from_w = from_w || part.phi.derived_from_W;
  }
  return {total, from_w};
}

}  // namespace ism
