#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "finsight/features.hpp"

namespace finsight::learn {

struct DtConfig {
  int max_depth = 12;
  int min_leaf = 5;
};

struct RfConfig {
  int n_trees = 100;
  int max_features = 0;  // 0 = ceil(sqrt(feature count))
  bool bootstrap = true;
  DtConfig tree;
};

struct GbtConfig {
  int n_rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 5;
  int min_leaf = 1;
};

struct LrConfig {
  int epochs = 300;
  double step = 0.1;
  double l2 = 1e-4;
};

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 20;
};

struct TrainConfig {
  DtConfig dt;
  RfConfig rf;
  GbtConfig gbt;
  LrConfig lr;
  SvmConfig svm;
  std::uint64_t seed = 0;

  void validate() const;  // positive bounds, learning rates in (0, 1]
};

// -------------------------------------------------------------------------
// Decision tree

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::VectorXd class_counts;  // leaves only: training rows per class

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  Eigen::VectorXd split_gain;   // per feature, weighted impurity decrease summed over splits
  int n_features = 0;
  int n_classes = 0;
  DtConfig params;
};

struct TreePrediction {
  int label = 0;
  Eigen::VectorXd proba;
};

struct SplitCandidate {
  int feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;  // parent impurity minus weighted child impurity
};

// 1 - sum((count_i / total)^2). All-zero counts raise EmptyNode.
double gini_impurity(const Eigen::Ref<const Eigen::VectorXd>& class_counts);

// Exhaustive scan over midpoints between consecutive distinct sorted values of
// each candidate feature; maximizes the impurity decrease. Ties break toward
// the lowest feature index, then the lowest threshold. nullopt when every
// candidate feature is constant over the rows.
std::optional<SplitCandidate> best_split(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                         const Eigen::Ref<const Eigen::VectorXi>& y,
                                         int n_classes,
                                         const std::vector<std::size_t>& rows,
                                         const std::vector<int>& candidate_features,
                                         int min_leaf = 1);

DecisionTreeModel train_decision_tree(const features::EncodedDataset& dataset,
                                      const DtConfig& config);

// Trains on a row subset (duplicates allowed, e.g. bootstrap samples). When
// draw_features is set it supplies the candidate subset for each split attempt.
DecisionTreeModel train_decision_tree_rows(const features::EncodedDataset& dataset,
                                           const DtConfig& config,
                                           std::vector<std::size_t> rows,
                                           std::function<std::vector<int>()> draw_features);

// Routes by `value < threshold` going left; probabilities are the reached
// leaf's distribution normalized.
TreePrediction predict_tree(const DecisionTreeModel& model,
                            const Eigen::Ref<const Eigen::RowVectorXd>& x);

Eigen::VectorXi predict_tree_batch(const DecisionTreeModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X);

// -------------------------------------------------------------------------
// Random forest

struct RandomForestModel {
  std::vector<DecisionTreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;  // derived from (seed, tree index)
  int max_features = 0;                   // resolved candidate count per split
  bool bootstrap = true;
  int n_features = 0;
  int n_classes = 0;
};

RandomForestModel train_random_forest(const features::EncodedDataset& dataset,
                                      const RfConfig& config, std::uint64_t seed);

// Majority vote over trees; ties go to the lowest class id. The probability
// vector holds vote shares.
TreePrediction predict_forest(const RandomForestModel& model,
                              const Eigen::Ref<const Eigen::RowVectorXd>& x);

Eigen::VectorXi predict_forest_batch(const RandomForestModel& model,
                                     const Eigen::Ref<const Eigen::MatrixXd>& X);

// -------------------------------------------------------------------------
// Gradient-boosted trees (binary targets only)

struct RegressionNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaves: Newton step for the samples that land here
};

struct RegressionTree {
  std::vector<RegressionNode> nodes;
  Eigen::VectorXd split_gain;
};

struct GbtModel {
  double base_score = 0.0;  // log-odds of the clipped base rate
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;
  int n_features = 0;
  std::vector<double> training_loss;  // mean log-loss after 0..n_rounds rounds
};

GbtModel train_gbt(const features::EncodedDataset& dataset, const GbtConfig& config);

double predict_gbt(const GbtModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);
double gbt_raw_score(const GbtModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// -------------------------------------------------------------------------
// Linear models (binary targets only)

enum class LinearKind { logistic, svm };

struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  LinearKind kind = LinearKind::logistic;
};

struct LogisticObjective {
  double loss = 0.0;  // mean log-loss plus (l2/2)*||w||^2
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
};

LogisticObjective logistic_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                     const Eigen::Ref<const Eigen::VectorXi>& y,
                                     const Eigen::Ref<const Eigen::VectorXd>& weights,
                                     double bias, double l2);

LinearModel train_logistic(const features::EncodedDataset& dataset, const LrConfig& config);

// Pegasos-style stochastic subgradient descent on the hinge objective,
// lambda/2*||w||^2 + mean hinge, step 1/(lambda*t); sample order is a seeded
// shuffle per epoch.
LinearModel train_linear_svm(const features::EncodedDataset& dataset, const SvmConfig& config,
                             std::uint64_t seed);

double svm_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXi>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& weights, double bias,
                     double lambda);

// logistic: sigmoid(w.x + b); svm: the raw margin (AUC needs only ordering).
double linear_score(const LinearModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// logistic: score >= 0.5; svm: margin >= 0 -> positive class.
int linear_predict(const LinearModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

// -------------------------------------------------------------------------
// Feature importance: per tree the summed weighted impurity decrease per
// splitting feature; forests and boosters average over trees. Normalized to
// sum to 1 unless everything is zero.

Eigen::VectorXd feature_importance(const DecisionTreeModel& model);
Eigen::VectorXd feature_importance(const RandomForestModel& model);
Eigen::VectorXd feature_importance(const GbtModel& model);

double sigmoid(double z);

}  // namespace finsight::learn
