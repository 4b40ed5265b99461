#pragma once

#include "ism/kernel.hpp"
#include "ism/types.hpp"

#include <cstdint>
#include <vector>

namespace ism {

/// I(A;B) / sqrt(H(A) H(B)) with natural logs. When either side is a single
/// cluster the score is 1 for identical partitions and 0 otherwise.
double nmi(const Labels& a, const Labels& b);

/// Fraction of test rows whose Euclidean k-NN majority vote matches. Ties go
/// to the class with the smaller mean neighbor distance, then the lower id.
double knn_accuracy(const Matrix& X_train, const Labels& y_train, const Matrix& X_test,
                    const Labels& y_test, int k = 5);

struct FoldPlan {
  std::vector<int> assignments;
  int folds = 0;
  std::uint64_t seed = 0;
};

/// Stratified plans deal each class's shuffled members round-robin across
/// folds; unstratified plans deal a single shuffled permutation.
FoldPlan make_fold_plan(const Labels& labels, int folds, std::uint64_t seed, bool stratified = true);

struct FoldOutcome {
  double accuracy = 0.0;
  double cost = 0.0;
  double seconds = 0.0;
  int iterations = 0;
  bool converged = false;
  double eigengap = 0.0;
  Matrix W;
};

struct CrossValidationResult {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_cost = 0.0;
  double mean_seconds = 0.0;
  std::vector<FoldOutcome> folds;
};

struct CrossValidationOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  int neighbors = 5;
  double delta = 0.01;
  int max_iter = 50;
};

/// Per fold: standardize with training statistics, fit the supervised
/// reduction on the training rows only, then score k-NN on XW.
CrossValidationResult cross_validate(const DataMatrix& X, const Labels& labels, const KernelSpec& spec,
                                     Eigen::Index q, const CrossValidationOptions& options = {});

}  // namespace ism
