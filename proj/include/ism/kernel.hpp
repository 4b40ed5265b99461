#pragma once

// ISM kernel family. Every member is written as f(beta) with
// beta = a(x_i, x_j)^T W W^T b(x_i, x_j), where (a, b) is either the point
// pair (x_i, x_j) or the difference pair (x_i - x_j, x_i - x_j).

#include "ism/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ism {

enum class KernelKind { Linear, Squared, Polynomial, Gaussian, Multiquadratic, RelativeRBF, Conic };

enum class PairKind { PointPair, DifferencePair };

struct ConicTerm;

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;

  /// Gaussian bandwidth. Ignored while `sigma_from_median` is set.
  double sigma = 1.0;
  bool sigma_from_median = false;

  /// Polynomial (beta + offset)^degree; Multiquadratic sqrt(beta + offset^2).
  int degree = 3;
  double offset = 1.0;

  /// RelativeRBF: one bandwidth per sample. Empty until resolved against data.
  std::vector<double> per_sample_sigmas;

  /// Conic: strictly positive weights over non-conic parts.
  std::vector<ConicTerm> parts;

  static KernelSpec linear();
  static KernelSpec squared();
  static KernelSpec polynomial(int degree = 3, double offset = 1.0);
  static KernelSpec gaussian(double sigma);
  static KernelSpec gaussian_median();
  static KernelSpec multiquadratic(double offset = 1.0);
  static KernelSpec relative_rbf(std::vector<double> sigmas = {});
  /// Nested conic terms are flattened with their weights multiplied through.
  static KernelSpec conic(std::vector<ConicTerm> terms);

  PairKind pair_kind() const;
  bool is_conic() const { return kind == KernelKind::Conic; }
  /// True when no data-dependent parameter is still pending.
  bool resolved() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&);
};

struct ConicTerm {
  double weight = 1.0;
  KernelSpec kernel;

  friend bool operator==(const ConicTerm&, const ConicTerm&) = default;
};

/// Throws std::invalid_argument when a kernel parameter is out of range.
void validate(const KernelSpec& spec);

/// Fills median bandwidths and relative per-sample bandwidths from X.
KernelSpec resolve(const KernelSpec& spec, const DataMatrix& X);

double f_beta(const KernelSpec& spec, double beta, std::size_t i = 0, std::size_t j = 0);
double f_beta_prime(const KernelSpec& spec, double beta, std::size_t i = 0, std::size_t j = 0);

/// beta_ij for every pair under one pair kind; mirrored from the upper triangle.
Matrix beta_matrix(const DataMatrix& X, const Matrix& W, PairKind kind);

/// K[i][j] = f(beta_ij). For conic specs, sum_k mu_k K_k in part order, each
/// part evaluated with its own beta.
Matrix kernel_matrix(const DataMatrix& X, const Matrix& W, const KernelSpec& spec);

/// F'[i][j] = f'(beta_ij) for a non-conic spec.
Matrix kernel_derivative_matrix(const DataMatrix& X, const Matrix& W, const KernelSpec& spec);

/// Median of the pairwise Euclidean distances between rows.
double median_bandwidth(const DataMatrix& X);

/// sigma_i = median distance from x_i to every other row.
std::vector<double> relative_bandwidths(const DataMatrix& X);

/// Token grammar: linear | squared | poly:p=3,c=1 | gauss:sigma=median|<float>
/// | multiquad:c=1 | relrbf | conic:<w>*<token>+<w>*<token>...
KernelSpec parse_kernel(std::string_view token);
std::string to_token(const KernelSpec& spec);

/// Human-readable token list used in error messages.
std::string_view valid_kernel_tokens();

}  // namespace ism
