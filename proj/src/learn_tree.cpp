#include <algorithm>
#include <cmath>
#include <functional>

#include "finsight/error.hpp"
#include "finsight/learn.hpp"

namespace finsight::learn {

void TrainConfig::validate() const {
  if (dt.max_depth < 0 || dt.min_leaf < 1) raise(Errc::bad_config, "bad decision tree bounds");
  if (rf.n_trees < 1 || rf.max_features < 0 || rf.tree.max_depth < 0 || rf.tree.min_leaf < 1) {
    raise(Errc::bad_config, "bad random forest bounds");
  }
  if (gbt.n_rounds < 0 || gbt.max_depth < 0 || gbt.min_leaf < 1 ||
      !(gbt.learning_rate > 0.0 && gbt.learning_rate <= 1.0)) {
    raise(Errc::bad_config, "bad gbt bounds (learning rate must lie in (0,1])");
  }
  if (lr.epochs < 0 || !(lr.step > 0.0) || lr.l2 < 0.0) raise(Errc::bad_config, "bad logistic bounds");
  if (svm.epochs < 0 || !(svm.lambda > 0.0)) raise(Errc::bad_config, "bad svm bounds");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double gini_impurity(const Eigen::Ref<const Eigen::VectorXd>& class_counts) {
  const double total = class_counts.sum();
  if (total <= 0.0) raise(Errc::empty_node, "gini of an empty node");
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < class_counts.size(); ++i) {
    const double p = class_counts[i] / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

std::optional<SplitCandidate> best_split(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                         const Eigen::Ref<const Eigen::VectorXi>& y,
                                         int n_classes,
                                         const std::vector<std::size_t>& rows,
                                         const std::vector<int>& candidate_features,
                                         int min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;

  Eigen::VectorXd parent_counts = Eigen::VectorXd::Zero(n_classes);
  for (std::size_t r : rows) parent_counts[y[static_cast<Eigen::Index>(r)]] += 1.0;
  const double parent_impurity = gini_impurity(parent_counts);
  const double total = static_cast<double>(n);

  std::vector<int> features = candidate_features;
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, int>> values(n);
  std::vector<double> left(static_cast<std::size_t>(n_classes));
  std::vector<double> right(static_cast<std::size_t>(n_classes));

  for (int f : features) {
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(rows[i]);
      values[i] = {X(r, f), y[r]};
    }
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (values.front().first == values.back().first) continue;  // constant feature

    std::fill(left.begin(), left.end(), 0.0);
    for (int c = 0; c < n_classes; ++c) right[static_cast<std::size_t>(c)] = parent_counts[c];
    // Running sums of squared class counts keep each candidate O(1).
    double sq_left = 0.0;
    double sq_right = parent_counts.squaredNorm();

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int label = values[i].second;
      sq_left += 2.0 * left[static_cast<std::size_t>(label)] + 1.0;
      left[static_cast<std::size_t>(label)] += 1.0;
      sq_right -= 2.0 * right[static_cast<std::size_t>(label)] - 1.0;
      right[static_cast<std::size_t>(label)] -= 1.0;

      if (values[i + 1].first == values[i].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = total - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double threshold = 0.5 * (values[i].first + values[i + 1].first);
      if (!(values[i].first < threshold)) continue;  // midpoint collapsed onto the left value

      const double weighted_child = ((nl - sq_left / nl) + (nr - sq_right / nr)) / total;
      const double decrease = parent_impurity - weighted_child;
      if (!best || decrease > best->decrease) {
        best = SplitCandidate{f, threshold, decrease};
      }
    }
  }
  return best;
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXi& y;
  int n_classes;
  DtConfig config;
  // When set, draws the candidate feature subset for one split attempt.
  std::function<std::vector<int>()> draw_features;

  std::vector<TreeNode> nodes;
  Eigen::VectorXd gain;
  double root_rows = 0.0;

  std::vector<int> all_features() const {
    std::vector<int> f(static_cast<std::size_t>(X.cols()));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<int>(i);
    return f;
  }

  Eigen::VectorXd tally(const std::vector<std::size_t>& rows) const {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
    for (std::size_t r : rows) counts[y[static_cast<Eigen::Index>(r)]] += 1.0;
    return counts;
  }

  int build(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    Eigen::VectorXd counts = tally(rows);
    const bool pure = (counts.array() > 0.0).count() <= 1;
    const bool too_small = rows.size() < 2 * static_cast<std::size_t>(config.min_leaf);
    std::optional<SplitCandidate> split;
    if (!pure && !too_small && depth < config.max_depth) {
      const std::vector<int> candidates = draw_features ? draw_features() : all_features();
      split = best_split(X, y, n_classes, rows, candidates, config.min_leaf);
    }
    if (!split) {
      nodes[id].class_counts = std::move(counts);
      return id;
    }

    gain[split->feature] += (static_cast<double>(rows.size()) / root_rows) * split->decrease;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
      if (X(static_cast<Eigen::Index>(r), split->feature) < split->threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = build(std::move(left_rows), depth + 1);
    const int right = build(std::move(right_rows), depth + 1);
    nodes[id].feature = split->feature;
    nodes[id].threshold = split->threshold;
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }
};

int resolve_classes(const features::EncodedDataset& dataset) {
  int k = static_cast<int>(dataset.class_names.size());
  for (Eigen::Index i = 0; i < dataset.labels.size(); ++i) {
    if (dataset.labels[i] < 0) raise(Errc::id_out_of_range, "negative class id");
    k = std::max(k, dataset.labels[i] + 1);
  }
  return std::max(k, 1);
}

}  // namespace

DecisionTreeModel train_decision_tree_rows(const features::EncodedDataset& dataset,
                                           const DtConfig& config,
                                           std::vector<std::size_t> rows,
                                           std::function<std::vector<int>()> draw_features) {
  if (dataset.rows() == 0 || rows.empty()) raise(Errc::empty_dataset, "no rows to train on");
  TreeBuilder builder{dataset.matrix, dataset.labels, resolve_classes(dataset), config,
                      std::move(draw_features), {}, Eigen::VectorXd::Zero(dataset.cols()),
                      static_cast<double>(rows.size())};
  builder.build(std::move(rows), 0);

  DecisionTreeModel model;
  model.nodes = std::move(builder.nodes);
  model.split_gain = std::move(builder.gain);
  model.n_features = static_cast<int>(dataset.cols());
  model.n_classes = builder.n_classes;
  model.params = config;
  return model;
}

DecisionTreeModel train_decision_tree(const features::EncodedDataset& dataset,
                                      const DtConfig& config) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(dataset.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return train_decision_tree_rows(dataset, config, std::move(rows), nullptr);
}

namespace {

const TreeNode& route(const DecisionTreeModel& model,
                      const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.n_features) {
    raise(Errc::width_mismatch, "input has " + std::to_string(x.size()) + " features, model wants " +
                                    std::to_string(model.n_features));
  }
  const TreeNode* node = &model.nodes.front();
  while (!node->is_leaf()) {
    node = x[node->feature] < node->threshold ? &model.nodes[static_cast<std::size_t>(node->left)]
                                              : &model.nodes[static_cast<std::size_t>(node->right)];
  }
  return *node;
}

int first_argmax(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

TreePrediction predict_tree(const DecisionTreeModel& model,
                            const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const TreeNode& leaf = route(model, x);
  TreePrediction out;
  out.proba = leaf.class_counts / leaf.class_counts.sum();
  out.label = first_argmax(out.proba);
  return out;
}

Eigen::VectorXi predict_tree_batch(const DecisionTreeModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X) {
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict_tree(model, X.row(i)).label;
  return out;
}

Eigen::VectorXd feature_importance(const DecisionTreeModel& model) {
  const double total = model.split_gain.sum();
  if (total <= 0.0) return Eigen::VectorXd::Zero(model.split_gain.size());
  return model.split_gain / total;
}

}  // namespace finsight::learn
