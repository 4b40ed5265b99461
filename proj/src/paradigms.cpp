#include "ism/paradigms.hpp"

#include "ism/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

namespace ism {

ProjectionResult supervised_dr(const DataMatrix& X, const Labels& labels, const KernelSpec& spec,
                               Eigen::Index q, double delta, int max_iter) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) {
    throw std::invalid_argument("label count " + std::to_string(labels.size()) +
                                " does not match sample count " + std::to_string(X.rows()));
  }
  if (X.rows() < q) throw std::invalid_argument("supervised reduction needs n >= q");
  const GammaMatrix Gamma = gamma_supervised(labels);
  if (Gamma.values.cwiseAbs().maxCoeff() <= 1e-12) {
    throw std::invalid_argument("coupling matrix is zero (labels contain a single class)");
  }
  return ism_solve(X, Gamma, spec, q, {.delta = delta, .max_iter = max_iter});
}

// ---------------------------------------------------------------------------
// k-means

namespace {

Labels canonical_order(const Labels& labels, int k) {
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  Labels out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& slot = remap[static_cast<std::size_t>(labels[i])];
    if (slot < 0) slot = next++;
    out[i] = slot;
  }
  return out;
}

struct LloydRun {
  Labels labels;
  double inertia = 0.0;
};

LloydRun lloyd(const Matrix& points, int k, std::mt19937_64& rng, int max_iter) {
  const auto n = points.rows();
  Matrix centers(k, points.cols());

  // k-means++ seeding.
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  Vector nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= nearest(chosen);
        if (target <= 0.0 && nearest(chosen) > 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = points.row(chosen);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  Labels labels(static_cast<std::size_t>(n), -1);
  Vector dist(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dd = (points.row(i) - centers.row(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      dist(i) = best_d;
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      } else {
        // Empty cluster: move it onto the worst-served point.
        Eigen::Index far = 0;
        dist.maxCoeff(&far);
        centers.row(c) = points.row(far);
        dist(far) = 0.0;
      }
    }
  }
  return {labels, kmeans_inertia(points, labels)};
}

}  // namespace

double kmeans_inertia(const Matrix& points, const Labels& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != points.rows()) {
    throw std::invalid_argument("label count does not match point count");
  }
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    inertia += (points.row(i) - sums.row(c) / counts[static_cast<std::size_t>(c)]).squaredNorm();
  }
  return inertia;
}

Labels kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw std::invalid_argument("k-means needs k >= 1");
  if (points.rows() < k) {
    throw std::invalid_argument("k-means needs at least k=" + std::to_string(k) + " points, got " +
                                std::to_string(points.rows()));
  }
  std::mt19937_64 rng(seed);
  LloydRun best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    LloydRun run = lloyd(points, k, rng, options.max_iter);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return canonical_order(best.labels, k);
}

// ---------------------------------------------------------------------------
// Spectral clustering

SpectralEmbedding spectral_clustering(const Matrix& K, int k, std::uint64_t seed, bool* degenerate) {
  if (K.rows() != K.cols()) throw std::invalid_argument("similarity matrix must be square");
  if (k < 1 || k > K.rows()) throw std::invalid_argument("cluster count must lie in [1, n]");
  const Vector degrees = K.rowwise().sum();
  Vector inv_sqrt(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    if (!(degrees(i) > 0.0)) {
      throw std::invalid_argument("degenerate degree matrix: row " + std::to_string(i) +
                                  " has non-positive degree");
    }
    inv_sqrt(i) = 1.0 / std::sqrt(degrees(i));
  }
  Matrix affinity = inv_sqrt.asDiagonal() * K * inv_sqrt.asDiagonal();
  affinity = 0.5 * (affinity + affinity.transpose());

  const DominantEigenpairs top = dominant_eigenvectors(affinity, k);
  if (degenerate != nullptr) {
    *degenerate = top.eigengap <= 1e-10 * std::max(1.0, std::abs(top.values(0)));
  }

  Matrix rows = top.vectors;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0.0) rows.row(i) /= norm;
  }
  return {top.vectors, kmeans(rows, k, seed)};
}

double spectral_objective(const Matrix& K_XW, const Matrix& Y_embed) {
  return spectral_coupling(K_XW, Y_embed).cwiseProduct(K_XW).sum();
}

void require_similarity_kernel(const KernelSpec& spec) {
  if (spec.kind == KernelKind::Squared) {
    throw std::invalid_argument("the squared kernel is not a similarity and cannot drive spectral clustering");
  }
  for (const auto& t : spec.parts) require_similarity_kernel(t.kernel);
}

// ---------------------------------------------------------------------------
// Alternating drivers

namespace {

void validate_config(const DataMatrix& X, const ParadigmConfig& config) {
  if (config.clusters < 2) throw std::invalid_argument("clustering needs k >= 2 clusters");
  if (config.clusters > X.rows()) throw std::invalid_argument("more clusters than samples");
  if (config.q < 1 || config.q > X.cols()) throw std::invalid_argument("q must lie in [1, d]");
  if (!(config.mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  if (config.outer_iters < 1) throw std::invalid_argument("outer_iters must be >= 1");
}

using CouplingFn = std::function<GammaMatrix(const Matrix& K_XW, const Matrix& Y)>;
using ObjectiveFn = std::function<double(const Matrix& K_XW, const Matrix& Y)>;

ClusteringResult alternate(const DataMatrix& X, const KernelSpec& spec, const ParadigmConfig& config,
                           const CouplingFn& coupling, const ObjectiveFn& objective) {
  validate_config(X, config);
  require_similarity_kernel(spec);
  const KernelSpec kernel = resolve(spec, X);

  ClusteringResult result;
  Matrix W = Matrix::Identity(X.cols(), config.q);
  Matrix K = kernel_matrix(X, W, kernel);
  bool degenerate = false;
  SpectralEmbedding embedding = spectral_clustering(K, config.clusters, config.seed, &degenerate);
  result.degenerate_split = degenerate;
  result.label_history.push_back(embedding.labels);

  const IsmOptions ism_options{.delta = config.delta, .max_iter = config.max_iter};
  for (int outer = 1; outer <= config.outer_iters; ++outer) {
    result.last_gamma = coupling(K, embedding.Y_embed);
    result.last_projection = ism_solve(X, result.last_gamma, kernel, config.q, ism_options);
    W = result.last_projection.W;

    K = kernel_matrix(X, W, kernel);
    embedding = spectral_clustering(K, config.clusters, config.seed, &degenerate);
    result.degenerate_split = result.degenerate_split || degenerate;
    result.label_history.push_back(embedding.labels);

    const double value = objective(K, embedding.Y_embed);
    result.outer_iterations = outer;
    if (!result.history.empty()) {
      const double prev = result.history.back();
      const double scale = std::max(std::abs(value), std::numeric_limits<double>::min());
      if (std::abs(value - prev) / scale < config.delta) result.converged = true;
    }
    result.history.push_back(value);
    if (result.converged) break;
  }

  result.W = std::move(W);
  result.Y_embed = std::move(embedding.Y_embed);
  result.labels = std::move(embedding.labels);
  return result;
}

}  // namespace

ClusteringResult unsupervised_dr(const DataMatrix& X, const KernelSpec& spec, const ParadigmConfig& config) {
  return alternate(
      X, spec, config,
      [](const Matrix&, const Matrix& Y) { return gamma_unsupervised(Y); },
      [](const Matrix& K, const Matrix& Y) {
        return gamma_unsupervised(Y).values.cwiseProduct(K).sum();
      });
}

ClusteringResult semisupervised_dr(const DataMatrix& X, const Matrix& expert_scores, const KernelSpec& spec,
                                   const ParadigmConfig& config) {
  if (expert_scores.cols() < 1) throw std::invalid_argument("expert scores need at least one column");
  if (expert_scores.rows() != X.rows()) throw std::invalid_argument("expert score rows do not match X");
  const Matrix K_hat = kernel_matrix(expert_scores, Matrix::Identity(expert_scores.cols(), expert_scores.cols()),
                                     KernelSpec::gaussian(median_bandwidth(expert_scores)));
  const Matrix centered = double_center(K_hat);
  const double mu = config.mu;
  return alternate(
      X, spec, config,
      [&](const Matrix& K, const Matrix& Y) { return gamma_semisupervised(K, Y, K_hat, mu); },
      [&, mu](const Matrix& K, const Matrix& Y) {
        return spectral_objective(K, Y) + mu * centered.cwiseProduct(K).sum();
      });
}

ClusteringResult alternative_clustering(const DataMatrix& X, const Labels& original_labels,
                                        const KernelSpec& spec, const ParadigmConfig& config) {
  if (static_cast<Eigen::Index>(original_labels.size()) != X.rows()) {
    throw std::invalid_argument("original label count does not match X");
  }
  const Matrix K_hat = delta_kernel(original_labels);
  const Matrix centered = double_center(K_hat);
  const double mu = config.mu;
  ClusteringResult result = alternate(
      X, spec, config,
      [&](const Matrix& K, const Matrix& Y) { return gamma_alternative(K, Y, K_hat, mu); },
      [&, mu](const Matrix& K, const Matrix& Y) {
        return spectral_objective(K, Y) - mu * centered.cwiseProduct(K).sum();
      });
  result.nmi_vs_reference = nmi(result.labels, original_labels);
  return result;
}

}  // namespace ism
