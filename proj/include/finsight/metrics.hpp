#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace finsight::metrics {

// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  std::vector<std::string> class_names;  // optional; sized K when present
  Eigen::MatrixXi cells;

  int num_classes() const { return static_cast<int>(cells.rows()); }
  long total() const { return cells.sum(); }
};

struct BinaryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double auc = 0.0;
  int positive_class = 1;
};

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  long support = 0;
};

using PerClassMetrics = std::vector<ClassMetrics>;

ConfusionMatrix confusion_matrix(const Eigen::Ref<const Eigen::VectorXi>& truth,
                                 const Eigen::Ref<const Eigen::VectorXi>& predicted,
                                 int num_classes,
                                 std::vector<std::string> class_names = {});

// Zero denominators yield 0, so report tables stay total.
std::pair<double, double> precision_recall(const ConfusionMatrix& cm, int class_id);

// One-vs-rest precision/recall per class; support is the truth row sum.
PerClassMetrics per_class_metrics(const ConfusionMatrix& cm);

// Rank-based (Mann-Whitney) AUC with midrank tie handling: the fraction of
// (positive, negative) pairs ranked correctly, ties worth 0.5. Truth entries
// are 0/1 with 1 the positive class.
double auc(const Eigen::Ref<const Eigen::VectorXi>& truth,
           const Eigen::Ref<const Eigen::VectorXd>& scores);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// One point per distinct score threshold, descending, starting at (0,0) and
// ending at (1,1). Trapezoidal area equals auc().
std::vector<RocPoint> roc_curve(const Eigen::Ref<const Eigen::VectorXi>& truth,
                                const Eigen::Ref<const Eigen::VectorXd>& scores);

double trapezoid_area(const std::vector<RocPoint>& curve);

}  // namespace finsight::metrics
