#include "finsight/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "finsight/error.hpp"

namespace finsight::metrics {

ConfusionMatrix confusion_matrix(const Eigen::Ref<const Eigen::VectorXi>& truth,
                                 const Eigen::Ref<const Eigen::VectorXi>& predicted,
                                 int num_classes,
                                 std::vector<std::string> class_names) {
  if (truth.size() != predicted.size()) {
    raise(Errc::length_mismatch, "truth has " + std::to_string(truth.size()) +
                                     " entries, predictions " + std::to_string(predicted.size()));
  }
  if (num_classes < 1) raise(Errc::id_out_of_range, "class count must be >= 1");
  ConfusionMatrix cm;
  cm.class_names = std::move(class_names);
  cm.cells = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
      raise(Errc::id_out_of_range, "class id out of range at position " + std::to_string(i));
    }
    cm.cells(t, p) += 1;
  }
  return cm;
}

std::pair<double, double> precision_recall(const ConfusionMatrix& cm, int class_id) {
  const int k = cm.num_classes();
  if (class_id < 0 || class_id >= k) raise(Errc::id_out_of_range, "class id " + std::to_string(class_id));
  const long tp = cm.cells(class_id, class_id);
  const long predicted = cm.cells.col(class_id).sum();
  const long actual = cm.cells.row(class_id).sum();
  const double precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  const double recall = actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
  return {precision, recall};
}

PerClassMetrics per_class_metrics(const ConfusionMatrix& cm) {
  PerClassMetrics out;
  const int k = cm.num_classes();
  out.reserve(k);
  for (int c = 0; c < k; ++c) {
    auto [precision, recall] = precision_recall(cm, c);
    ClassMetrics m;
    m.name = c < static_cast<int>(cm.class_names.size()) ? cm.class_names[c] : "class " + std::to_string(c);
    m.precision = precision;
    m.recall = recall;
    m.support = cm.cells.row(c).sum();
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

struct Tally {
  long positives = 0;
  long negatives = 0;
};

Tally count_classes(const Eigen::Ref<const Eigen::VectorXi>& truth) {
  Tally t;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth[i] > 0) {
      ++t.positives;
    } else {
      ++t.negatives;
    }
  }
  if (t.positives == 0 || t.negatives == 0) {
    raise(Errc::one_class_only, "AUC needs both classes present");
  }
  return t;
}

}  // namespace

double auc(const Eigen::Ref<const Eigen::VectorXi>& truth,
           const Eigen::Ref<const Eigen::VectorXd>& scores) {
  if (truth.size() != scores.size()) {
    raise(Errc::length_mismatch, "truth/scores length mismatch");
  }
  const Tally tally = count_classes(truth);
  const Eigen::Index n = truth.size();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

  // Midranks over groups of tied scores; ranks are 1-based.
  double positive_rank_sum = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (Eigen::Index k = i; k < j; ++k) {
      if (truth[order[k]] > 0) positive_rank_sum += midrank;
    }
    i = j;
  }

  const double np = static_cast<double>(tally.positives);
  const double nn = static_cast<double>(tally.negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<RocPoint> roc_curve(const Eigen::Ref<const Eigen::VectorXi>& truth,
                                const Eigen::Ref<const Eigen::VectorXd>& scores) {
  if (truth.size() != scores.size()) {
    raise(Errc::length_mismatch, "truth/scores length mismatch");
  }
  const Tally tally = count_classes(truth);
  const Eigen::Index n = truth.size();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0});
  long tp = 0;
  long fp = 0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (Eigen::Index k = i; k < j; ++k) {
      if (truth[order[k]] > 0) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(tally.negatives),
                     static_cast<double>(tp) / static_cast<double>(tally.positives)});
    i = j;
  }
  return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) * 0.5;
  }
  return area;
}

}  // namespace finsight::metrics
