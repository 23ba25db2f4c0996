#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "finsight/error.hpp"
#include "finsight/metrics.hpp"
#include "finsight/rng.hpp"

using namespace finsight;
using namespace finsight::metrics;

namespace {

// O(n^2) pairwise oracle: fraction of (positive, negative) pairs ranked
// correctly, ties worth half. Independent of the rank-based implementation.
double brute_force_auc(const Eigen::VectorXi& truth, const Eigen::VectorXd& scores) {
  double wins = 0.0;
  long pairs = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth[i] != 1) continue;
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
      if (truth[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("auc on hand-worked four point case") {
  Eigen::VectorXi truth(4);
  truth << 1, 1, 0, 0;
  Eigen::VectorXd scores(4);
  scores << 0.9, 0.4, 0.8, 0.3;
  // pairs: (0.9,0.8) win, (0.9,0.3) win, (0.4,0.8) loss, (0.4,0.3) win
  CHECK(auc(truth, scores) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("auc extremes and ties") {
  Eigen::VectorXi truth(2);
  truth << 1, 0;
  Eigen::VectorXd separated(2);
  separated << 1.0, 0.0;
  CHECK(auc(truth, separated) == doctest::Approx(1.0));
  Eigen::VectorXd inverted(2);
  inverted << 0.0, 1.0;
  CHECK(auc(truth, inverted) == doctest::Approx(0.0));
  Eigen::VectorXd tied(2);
  tied << 0.5, 0.5;
  CHECK(auc(truth, tied) == doctest::Approx(0.5));
}

TEST_CASE("auc with one class present raises") {
  Eigen::VectorXi truth(3);
  truth << 1, 1, 1;
  Eigen::VectorXd scores(3);
  scores << 0.1, 0.2, 0.3;
  CHECK_THROWS_AS(auc(truth, scores), Error);
  try {
    auc(truth, scores);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::one_class_only);
  }
}

TEST_CASE("auc matches the pairwise oracle on random tied instances") {
  Rng rng(20240517);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 199));
    Eigen::VectorXi truth(n);
    Eigen::VectorXd scores(n);
    truth[0] = 1;  // force both classes
    truth[1] = 0;
    for (int i = 2; i < n; ++i) truth[i] = static_cast<int>(uniform_below(rng, 2));
    // Coarse score grid so ties happen constantly.
    for (int i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(uniform_below(rng, 8)) / 7.0;
    }
    const double fast = auc(truth, scores);
    const double slow = brute_force_auc(truth, scores);
    REQUIRE(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("roc curve endpoints and area on a separable case") {
  Eigen::VectorXi truth(2);
  truth << 1, 0;
  Eigen::VectorXd scores(2);
  scores << 0.9, 0.1;
  const auto curve = roc_curve(truth, scores);
  REQUIRE(curve.size() == 3);
  CHECK(curve.front().fpr == 0.0);
  CHECK(curve.front().tpr == 0.0);
  CHECK(curve[1].fpr == 0.0);
  CHECK(curve[1].tpr == 1.0);
  CHECK(curve.back().fpr == 1.0);
  CHECK(curve.back().tpr == 1.0);
  CHECK(trapezoid_area(curve) == doctest::Approx(1.0));
}

TEST_CASE("roc curve merges tied scores into one step") {
  Eigen::VectorXi truth(2);
  truth << 1, 0;
  Eigen::VectorXd scores(2);
  scores << 0.5, 0.5;
  const auto curve = roc_curve(truth, scores);
  REQUIRE(curve.size() == 2);  // (0,0) then the single joint step to (1,1)
  CHECK(trapezoid_area(curve) == doctest::Approx(0.5));
}

TEST_CASE("trapezoid area of the roc curve equals auc") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 120));
    Eigen::VectorXi truth(n);
    Eigen::VectorXd scores(n);
    truth[0] = 1;
    truth[1] = 0;
    for (int i = 2; i < n; ++i) truth[i] = static_cast<int>(uniform_below(rng, 2));
    for (int i = 0; i < n; ++i) scores[i] = static_cast<double>(uniform_below(rng, 11)) / 10.0;
    const double direct = auc(truth, scores);
    const double via_curve = trapezoid_area(roc_curve(truth, scores));
    REQUIRE(std::abs(direct - via_curve) < 1e-12);
  }
}

TEST_CASE("confusion matrix places truth in rows") {
  Eigen::VectorXi truth(4);
  truth << 0, 1, 1, 2;
  Eigen::VectorXi pred(4);
  pred << 0, 2, 1, 2;
  const ConfusionMatrix cm = confusion_matrix(truth, pred, 3, {"a", "b", "c"});
  CHECK(cm.num_classes() == 3);
  CHECK(cm.total() == 4);
  CHECK(cm.cells(0, 0) == 1);
  CHECK(cm.cells(1, 1) == 1);
  CHECK(cm.cells(1, 2) == 1);
  CHECK(cm.cells(2, 2) == 1);
  CHECK(cm.cells(2, 0) == 0);

  const auto [precision_c, recall_c] = precision_recall(cm, 2);
  CHECK(precision_c == doctest::Approx(0.5));  // predicted c twice, right once
  CHECK(recall_c == doctest::Approx(1.0));     // the one true c was found
}

TEST_CASE("precision and recall fall back to zero on empty denominators") {
  Eigen::VectorXi truth(2);
  truth << 0, 0;
  Eigen::VectorXi pred(2);
  pred << 0, 0;
  const ConfusionMatrix cm = confusion_matrix(truth, pred, 2);
  const auto [precision_b, recall_b] = precision_recall(cm, 1);
  CHECK(precision_b == 0.0);
  CHECK(recall_b == 0.0);
}

TEST_CASE("per class metrics carry names and supports") {
  Eigen::VectorXi truth(5);
  truth << 0, 0, 1, 1, 1;
  Eigen::VectorXi pred(5);
  pred << 0, 1, 1, 1, 0;
  const ConfusionMatrix cm = confusion_matrix(truth, pred, 2, {"no", "yes"});
  const PerClassMetrics per_class = per_class_metrics(cm);
  REQUIRE(per_class.size() == 2);
  CHECK(per_class[0].name == "no");
  CHECK(per_class[0].support == 2);
  CHECK(per_class[1].name == "yes");
  CHECK(per_class[1].support == 3);
  CHECK(per_class[1].precision == doctest::Approx(2.0 / 3.0));
  CHECK(per_class[1].recall == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("confusion matrix rejects out of range labels") {
  Eigen::VectorXi truth(1);
  truth << 5;
  Eigen::VectorXi pred(1);
  pred << 0;
  CHECK_THROWS_AS(confusion_matrix(truth, pred, 2), Error);
}

TEST_CASE("length mismatch between truth and scores raises") {
  Eigen::VectorXi truth(3);
  truth << 1, 0, 1;
  Eigen::VectorXd scores(2);
  scores << 0.5, 0.5;
  CHECK_THROWS_AS(auc(truth, scores), Error);
}
