#pragma once

// Learning paradigms reduced to Tr(Gamma K_XW) plus ism_solve. The clustering
// paradigms alternate a spectral-clustering Y-step with an ISM W-step.

#include "ism/gamma.hpp"
#include "ism/kernel.hpp"
#include "ism/solver.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ism {

enum class Task { Supervised, Unsupervised, SemiSupervised, Alternative };

struct ParadigmConfig {
  Task task = Task::Supervised;
  Eigen::Index q = 2;
  int clusters = 2;
  double mu = 1.0;
  double delta = 0.01;
  int max_iter = 50;
  int outer_iters = 10;
  std::uint64_t seed = 0;
};

struct SpectralEmbedding {
  Matrix Y_embed;  // n x k, orthonormal columns
  Labels labels;
};

struct ClusteringResult {
  Matrix W;
  Labels labels;
  Matrix Y_embed;
  std::optional<double> nmi_vs_reference;
  /// Composite objective after each outer iteration.
  std::vector<double> history;
  /// Labels produced by the Y-step of each outer iteration.
  std::vector<Labels> label_history;
  /// Coupling matrix handed to the final W-step.
  GammaMatrix last_gamma;
  /// Result of the final W-step.
  ProjectionResult last_projection;
  int outer_iterations = 0;
  bool converged = false;
  /// Set when the similarity spectrum cannot support k distinct clusters
  /// (eigengap at the k-boundary is numerically zero).
  bool degenerate_split = false;
};

ProjectionResult supervised_dr(const DataMatrix& X, const Labels& labels, const KernelSpec& spec,
                               Eigen::Index q, double delta = 0.01, int max_iter = 50);

struct KMeansOptions {
  int max_iter = 100;
  /// Independent k-means++ starts; the lowest-inertia run wins.
  int restarts = 10;
};

Labels kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Within-cluster sum of squared distances to the cluster means.
double kmeans_inertia(const Matrix& points, const Labels& labels);

/// Top-k eigenvectors of D^{-1/2} K D^{-1/2}; labels from k-means on the
/// row-normalized embedding.
SpectralEmbedding spectral_clustering(const Matrix& K, int k, std::uint64_t seed,
                                      bool* degenerate = nullptr);

ClusteringResult unsupervised_dr(const DataMatrix& X, const KernelSpec& spec, const ParadigmConfig& config);

ClusteringResult semisupervised_dr(const DataMatrix& X, const Matrix& expert_scores, const KernelSpec& spec,
                                   const ParadigmConfig& config);

ClusteringResult alternative_clustering(const DataMatrix& X, const Labels& original_labels,
                                        const KernelSpec& spec, const ParadigmConfig& config);

/// Tr(Y^T D^{-1/2} K D^{-1/2} Y).
double spectral_objective(const Matrix& K_XW, const Matrix& Y_embed);

/// Rejects kernels that cannot act as a clustering affinity.
void require_similarity_kernel(const KernelSpec& spec);

}  // namespace ism
