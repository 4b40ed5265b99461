#include <doctest.h>

#include "ism/metrics.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace ism;
using namespace ism::testing;

TEST_CASE("nmi examples") {
  const Labels a{0, 0, 1, 1};
  CHECK(nmi(a, a) == 1.0);
  CHECK(nmi(a, Labels{0, 1, 0, 1}) == 0.0);
  CHECK(nmi(a, Labels{1, 1, 0, 0}) == 1.0);
}

TEST_CASE("nmi single-cluster conventions") {
  CHECK(nmi(Labels{0, 0, 0}, Labels{5, 5, 5}) == 1.0);
  CHECK(nmi(Labels{0, 0, 0}, Labels{0, 1, 0}) == 0.0);
  CHECK_THROWS(nmi(Labels{0, 1}, Labels{0}));
  CHECK_THROWS(nmi(Labels{}, Labels{}));
}

TEST_CASE("nmi agrees with the probability-table definition and is symmetric") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Labels a = random_labels(40, 2 + trial % 4, 100 + trial);
    const Labels b = random_labels(40, 2 + trial % 3, 200 + trial);
    CHECK(nmi(a, b) == doctest::Approx(nmi_by_definition(a, b)).epsilon(1e-12));
    CHECK(nmi(a, b) == nmi(b, a));
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Labels renamed;
    for (int v : a) renamed.push_back(perm[static_cast<std::size_t>(v)]);
    CHECK(nmi(renamed, b) == nmi(a, b));
  }
}

TEST_CASE("k-NN examples") {
  const Matrix X = gaussian_matrix(10, 3, 4);
  const Labels y = random_labels(10, 3, 5);
  CHECK(knn_accuracy(X, y, X, y, 1) == 1.0);

  const Matrix single = Matrix::Zero(1, 3);
  const Labels y_test(10, 2);
  CHECK(knn_accuracy(single, Labels{2}, X, y_test, 5) == 1.0);

  Matrix xr(4, 2);
  xr << 0, 0, 1, 1, 0, 1, 1, 0;
  const Labels xor_labels{0, 0, 1, 1};
  CHECK(knn_accuracy(xr, xor_labels, xr, xor_labels, 1) == 1.0);
  CHECK_THROWS(knn_accuracy(Matrix(0, 2), Labels{}, xr, xor_labels, 1));
}

TEST_CASE("k-NN ties prefer the closer class") {
  Matrix train(4, 1);
  train << -1.0, -1.1, 2.0, 2.1;
  const Labels y{0, 0, 1, 1};
  Matrix test(1, 1);
  test << 0.2;
  CHECK(knn_accuracy(train, y, test, Labels{0}, 4) == 1.0);
}

TEST_CASE("stratified fold plans") {
  const Labels y = random_labels(53, 3, 9);
  const FoldPlan plan = make_fold_plan(y, 5, 1);
  std::map<int, std::map<int, int>> per_class;
  for (std::size_t i = 0; i < y.size(); ++i) per_class[y[i]][plan.assignments[i]] += 1;
  for (const auto& [cls, folds] : per_class) {
    int lo = 1 << 30, hi = 0;
    for (int f = 0; f < 5; ++f) {
      const int c = folds.count(f) ? folds.at(f) : 0;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi - lo <= 1);
  }
  CHECK(plan.assignments == make_fold_plan(y, 5, 1).assignments);
  CHECK_THROWS(make_fold_plan(Labels{0, 0, 0, 1}, 2, 0));
  CHECK_NOTHROW(make_fold_plan(Labels{0, 0, 0, 1}, 2, 0, false));
}

TEST_CASE("cross validation on separable blobs") {
  Matrix centers(2, 2);
  centers << -6, 0, 6, 0;
  const auto data = blobs(centers, 20, 0.5, 1, 21);
  const CrossValidationResult r = cross_validate(data.X, data.labels, KernelSpec::gaussian_median(), 1,
                                                 CrossValidationOptions{.folds = 5});
  CHECK(r.mean_accuracy == 1.0);
  CHECK(r.folds.size() == 5);
}

TEST_CASE("leave-one-out cross validation") {
  Matrix X(6, 2);
  X << 0, 0, 0.2, 0.1, 0.1, 0.3, 5, 5, 5.2, 5.1, 5.1, 5.3;
  const Labels y{0, 0, 0, 1, 1, 1};
  const CrossValidationResult r = cross_validate(
      X, y, KernelSpec::linear(), 1, CrossValidationOptions{.folds = 6, .stratified = false, .neighbors = 1});
  CHECK(r.folds.size() == 6);
}
