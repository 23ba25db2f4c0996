#include <algorithm>
#include <cmath>
#include <numeric>

#include "finsight/error.hpp"
#include "finsight/learn.hpp"

namespace finsight::learn {

namespace {

constexpr double kProbFloor = 1e-6;
constexpr double kHessianFloor = 1e-12;

double clip_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double mean_log_loss(const Eigen::VectorXi& y, const Eigen::VectorXd& raw) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double p = clip_prob(sigmoid(raw[i]));
    total += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(y.size());
}

struct RegressionSplit {
  int feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;  // drop in sum of squared errors, scaled by node size
};

// Squared-error analog of the classification scan; running sums of the target
// and its square make each candidate O(1).
std::optional<RegressionSplit> best_regression_split(const Eigen::MatrixXd& X,
                                                     const Eigen::VectorXd& target,
                                                     const std::vector<std::size_t>& rows,
                                                     int min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;

  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t r : rows) {
    const double v = target[static_cast<Eigen::Index>(r)];
    sum += v;
    sq += v * v;
  }
  const double total = static_cast<double>(n);
  const double parent_sse = sq - sum * sum / total;

  std::optional<RegressionSplit> best;
  std::vector<std::pair<double, double>> values(n);

  for (int f = 0; f < X.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(rows[i]);
      values[i] = {X(r, f), target[r]};
    }
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (values.front().first == values.back().first) continue;

    double sum_left = 0.0;
    double sq_left = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double v = values[i].second;
      sum_left += v;
      sq_left += v * v;

      if (values[i + 1].first == values[i].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = total - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double threshold = 0.5 * (values[i].first + values[i + 1].first);
      if (!(values[i].first < threshold)) continue;

      const double sum_right = sum - sum_left;
      const double sse_left = (sq_left - sum_left * sum_left / nl);
      const double sse_right = (sq - sq_left) - sum_right * sum_right / nr;
      const double decrease = (parent_sse - sse_left - sse_right) / total;
      if (!best || decrease > best->decrease) {
        best = RegressionSplit{f, threshold, decrease};
      }
    }
  }
  return best;
}

struct RegressionBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& residual;
  const Eigen::VectorXd& hessian;  // p*(1-p) per training row
  int max_depth;
  int min_leaf;

  std::vector<RegressionNode> nodes;
  Eigen::VectorXd gain;
  double root_rows = 0.0;

  int build(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    double sum_r = 0.0;
    double sq_r = 0.0;
    double sum_h = 0.0;
    for (std::size_t r : rows) {
      const Eigen::Index i = static_cast<Eigen::Index>(r);
      sum_r += residual[i];
      sq_r += residual[i] * residual[i];
      sum_h += hessian[i];
    }
    const double n = static_cast<double>(rows.size());
    const bool constant = (sq_r - sum_r * sum_r / n) <= 1e-24;
    const bool too_small = rows.size() < 2 * static_cast<std::size_t>(min_leaf);

    std::optional<RegressionSplit> split;
    if (!constant && !too_small && depth < max_depth) {
      split = best_regression_split(X, residual, rows, min_leaf);
    }
    if (!split) {
      nodes[id].value = sum_r / std::max(sum_h, kHessianFloor);
      return id;
    }

    gain[split->feature] += (n / root_rows) * split->decrease;

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

double tree_value(const RegressionTree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const RegressionNode* node = &tree.nodes.front();
  while (node->feature >= 0) {
    node = x[node->feature] < node->threshold ? &tree.nodes[static_cast<std::size_t>(node->left)]
                                              : &tree.nodes[static_cast<std::size_t>(node->right)];
  }
  return node->value;
}

void check_binary(const Eigen::VectorXi& labels) {
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      raise(Errc::not_binary, "label " + std::to_string(labels[i]) + " at row " +
                                  std::to_string(i) + "; expected 0 or 1");
    }
  }
}

}  // namespace

GbtModel train_gbt(const features::EncodedDataset& dataset, const GbtConfig& config) {
  if (dataset.rows() == 0) raise(Errc::empty_dataset, "no rows to train on");
  check_binary(dataset.labels);

  const Eigen::Index n = dataset.rows();
  const double base_rate = clip_prob(dataset.labels.cast<double>().mean());

  GbtModel model;
  model.base_score = std::log(base_rate / (1.0 - base_rate));
  model.learning_rate = config.learning_rate;
  model.n_features = static_cast<int>(dataset.cols());

  Eigen::VectorXd raw = Eigen::VectorXd::Constant(n, model.base_score);
  model.training_loss.push_back(mean_log_loss(dataset.labels, raw));

  Eigen::VectorXd residual(n);
  Eigen::VectorXd hessian(n);
  for (int round = 0; round < config.n_rounds; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      residual[i] = static_cast<double>(dataset.labels[i]) - p;
      hessian[i] = p * (1.0 - p);
    }

    RegressionBuilder builder{dataset.matrix, residual,     hessian,
                              config.max_depth, config.min_leaf, {},
                              Eigen::VectorXd::Zero(dataset.cols()), static_cast<double>(n)};
    std::vector<std::size_t> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    builder.build(std::move(rows), 0);

    RegressionTree tree;
    tree.nodes = std::move(builder.nodes);
    tree.split_gain = std::move(builder.gain);
    for (Eigen::Index i = 0; i < n; ++i) {
      raw[i] += config.learning_rate * tree_value(tree, dataset.matrix.row(i));
    }
    model.trees.push_back(std::move(tree));
    model.training_loss.push_back(mean_log_loss(dataset.labels, raw));
  }
  return model;
}

double gbt_raw_score(const GbtModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.n_features) {
    raise(Errc::width_mismatch, "input has " + std::to_string(x.size()) + " features, model wants " +
                                    std::to_string(model.n_features));
  }
  double score = model.base_score;
  for (const RegressionTree& tree : model.trees) {
    score += model.learning_rate * tree_value(tree, x);
  }
  return score;
}

double predict_gbt(const GbtModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return sigmoid(gbt_raw_score(model, x));
}

Eigen::VectorXd feature_importance(const GbtModel& model) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.n_features);
  if (model.trees.empty()) return mean;
  for (const RegressionTree& tree : model.trees) mean += tree.split_gain;
  mean /= static_cast<double>(model.trees.size());
  const double total = mean.sum();
  if (total <= 0.0) return Eigen::VectorXd::Zero(model.n_features);
  return mean / total;
}

}  // namespace finsight::learn
