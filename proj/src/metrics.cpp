#include "ism/metrics.hpp"

#include "ism/data_io.hpp"
#include "ism/paradigms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ism {

namespace {

// Sums after sorting so the result does not depend on label naming.
double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

double entropy(const std::map<int, double>& counts, double n) {
  std::vector<double> terms;
  terms.reserve(counts.size());
  for (const auto& [label, c] : counts) terms.push_back(-(c / n) * std::log(c / n));
  return ordered_sum(std::move(terms));
}

}  // namespace

double nmi(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw std::invalid_argument("nmi needs labelings of equal length");
  if (a.empty()) throw std::invalid_argument("nmi needs non-empty labelings");
  const double n = static_cast<double>(a.size());

  std::map<int, double> count_a, count_b;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    count_a[a[i]] += 1.0;
    count_b[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  const double h_a = entropy(count_a, n);
  const double h_b = entropy(count_b, n);
  if (count_a.size() == 1 || count_b.size() == 1) {
    return count_a.size() == count_b.size() ? 1.0 : 0.0;
  }

  std::vector<double> terms;
  terms.reserve(joint.size());
  for (const auto& [cell, c] : joint) {
    const double denom = count_a[cell.first] * count_b[cell.second];
    terms.push_back((c / n) * std::log(n * c / denom));
  }
  const double mi = ordered_sum(std::move(terms));
  return std::clamp(mi / std::sqrt(h_a * h_b), 0.0, 1.0);
}

double knn_accuracy(const Matrix& X_train, const Labels& y_train, const Matrix& X_test,
                    const Labels& y_test, int k) {
  if (X_train.rows() == 0 || X_test.rows() == 0) throw std::invalid_argument("k-NN needs non-empty train and test sets");
  if (static_cast<Eigen::Index>(y_train.size()) != X_train.rows() ||
      static_cast<Eigen::Index>(y_test.size()) != X_test.rows()) {
    throw std::invalid_argument("k-NN label counts do not match rows");
  }
  if (X_train.cols() != X_test.cols()) throw std::invalid_argument("k-NN train/test dimensions differ");
  if (k < 1) throw std::invalid_argument("k-NN needs k >= 1");
  const auto neighbors = std::min<Eigen::Index>(k, X_train.rows());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(X_train.rows()));
  std::vector<double> dist(order.size());
  int correct = 0;
  for (Eigen::Index t = 0; t < X_test.rows(); ++t) {
    for (Eigen::Index i = 0; i < X_train.rows(); ++i) {
      dist[static_cast<std::size_t>(i)] = (X_train.row(i) - X_test.row(t)).norm();
    }
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + neighbors, order.end(),
                      [&](Eigen::Index l, Eigen::Index r) {
                        const auto dl = dist[static_cast<std::size_t>(l)];
                        const auto dr = dist[static_cast<std::size_t>(r)];
                        return dl < dr || (dl == dr && l < r);
                      });
    std::map<int, std::pair<int, double>> votes;  // class -> (count, distance sum)
    for (Eigen::Index m = 0; m < neighbors; ++m) {
      const auto idx = static_cast<std::size_t>(order[static_cast<std::size_t>(m)]);
      auto& v = votes[y_train[idx]];
      v.first += 1;
      v.second += dist[idx];
    }
    int best_class = votes.begin()->first;
    int best_count = -1;
    double best_mean = 0.0;
    for (const auto& [cls, v] : votes) {
      const double mean = v.second / v.first;
      if (v.first > best_count || (v.first == best_count && mean < best_mean)) {
        best_class = cls;
        best_count = v.first;
        best_mean = mean;
      }
    }
    if (best_class == y_test[static_cast<std::size_t>(t)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(X_test.rows());
}

FoldPlan make_fold_plan(const Labels& labels, int folds, std::uint64_t seed, bool stratified) {
  if (folds < 2) throw std::invalid_argument("cross validation needs at least 2 folds");
  if (static_cast<int>(labels.size()) < folds) {
    throw std::invalid_argument("cannot split " + std::to_string(labels.size()) + " samples into " +
                                std::to_string(folds) + " folds");
  }
  std::mt19937_64 rng(seed);
  FoldPlan plan{std::vector<int>(labels.size(), -1), folds, seed};

  std::vector<std::vector<std::size_t>> groups;
  if (stratified) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (auto& [cls, members] : by_class) {
      if (static_cast<int>(members.size()) < folds) {
        throw std::invalid_argument("class " + std::to_string(cls) + " has " +
                                    std::to_string(members.size()) + " members, fewer than " +
                                    std::to_string(folds) + " folds");
      }
      groups.push_back(std::move(members));
    }
  } else {
    groups.emplace_back(labels.size());
    std::iota(groups.back().begin(), groups.back().end(), std::size_t{0});
  }

  int next = 0;
  for (auto& members : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t idx : members) {
      plan.assignments[idx] = next;
      next = (next + 1) % folds;
    }
  }
  return plan;
}

CrossValidationResult cross_validate(const DataMatrix& X, const Labels& labels, const KernelSpec& spec,
                                     Eigen::Index q, const CrossValidationOptions& options) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) {
    throw std::invalid_argument("label count does not match sample count");
  }
  const FoldPlan plan = make_fold_plan(labels, options.folds, options.seed, options.stratified);

  CrossValidationResult out;
  for (int f = 0; f < plan.folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (plan.assignments[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    }
    const Matrix X_train_raw = X(train, Eigen::all);
    const Matrix X_test_raw = X(test, Eigen::all);
    Labels y_train, y_test;
    for (auto i : train) y_train.push_back(labels[static_cast<std::size_t>(i)]);
    for (auto i : test) y_test.push_back(labels[static_cast<std::size_t>(i)]);

    const Standardization stats = fit_standardization(X_train_raw);
    const Matrix X_train = apply_standardization(stats, X_train_raw);
    const Matrix X_test = apply_standardization(stats, X_test_raw);

    const auto start = std::chrono::steady_clock::now();
    const ProjectionResult fit = supervised_dr(X_train, y_train, spec, q, options.delta, options.max_iter);
    const auto stop = std::chrono::steady_clock::now();

    FoldOutcome fold;
    fold.seconds = std::chrono::duration<double>(stop - start).count();
    fold.accuracy = knn_accuracy(X_train * fit.W, y_train, X_test * fit.W, y_test, options.neighbors);
    fold.cost = fit.cost;
    fold.iterations = fit.iterations;
    fold.converged = fit.converged;
    fold.eigengap = fit.eigengap;
    fold.W = fit.W;
    out.folds.push_back(std::move(fold));
  }

  const double count = static_cast<double>(out.folds.size());
  for (const auto& f : out.folds) {
    out.mean_accuracy += f.accuracy / count;
    out.mean_cost += f.cost / count;
    out.mean_seconds += f.seconds / count;
  }
  double var = 0.0;
  for (const auto& f : out.folds) var += (f.accuracy - out.mean_accuracy) * (f.accuracy - out.mean_accuracy);
  out.std_accuracy = std::sqrt(var / count);
  return out;
}

}  // namespace ism
