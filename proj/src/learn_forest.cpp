#include <algorithm>
#include <cmath>
#include <numeric>

#include "finsight/error.hpp"
#include "finsight/learn.hpp"
#include "finsight/rng.hpp"

namespace finsight::learn {

namespace {

int first_argmax(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

RandomForestModel train_random_forest(const features::EncodedDataset& dataset,
                                      const RfConfig& config, std::uint64_t seed) {
  if (dataset.rows() == 0) raise(Errc::empty_dataset, "no rows to train on");
  const int d = static_cast<int>(dataset.cols());
  const int m = config.max_features > 0
                    ? std::min(config.max_features, d)
                    : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

  RandomForestModel model;
  model.max_features = m;
  model.bootstrap = config.bootstrap;
  model.n_features = d;
  const std::size_t n = static_cast<std::size_t>(dataset.rows());

  for (int t = 0; t < config.n_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng gen(tree_seed);

    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::size_t>(uniform_below(gen, n));
      }
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }

    std::function<std::vector<int>()> draw;
    if (m < d) {
      draw = [&gen, d, m]() {
        std::vector<int> pool(static_cast<std::size_t>(d));
        std::iota(pool.begin(), pool.end(), 0);
        for (int j = 0; j < m; ++j) {
          const std::size_t pick =
              static_cast<std::size_t>(j) +
              static_cast<std::size_t>(uniform_below(gen, static_cast<std::uint64_t>(d - j)));
          std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
        }
        pool.resize(static_cast<std::size_t>(m));
        std::sort(pool.begin(), pool.end());
        return pool;
      };
    }

    model.trees.push_back(train_decision_tree_rows(dataset, config.tree, std::move(rows), draw));
    model.tree_seeds.push_back(tree_seed);
  }
  model.n_classes = model.trees.front().n_classes;
  return model;
}

TreePrediction predict_forest(const RandomForestModel& model,
                              const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  Eigen::VectorXd votes = Eigen::VectorXd::Zero(model.n_classes);
  for (const DecisionTreeModel& tree : model.trees) votes[predict_tree(tree, x).label] += 1.0;
  TreePrediction out;
  out.proba = votes / static_cast<double>(model.trees.size());
  out.label = first_argmax(out.proba);
  return out;
}

Eigen::VectorXi predict_forest_batch(const RandomForestModel& model,
                                     const Eigen::Ref<const Eigen::MatrixXd>& X) {
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict_forest(model, X.row(i)).label;
  return out;
}

Eigen::VectorXd feature_importance(const RandomForestModel& model) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.n_features);
  for (const DecisionTreeModel& tree : model.trees) mean += tree.split_gain;
  mean /= static_cast<double>(model.trees.size());
  const double total = mean.sum();
  if (total <= 0.0) return Eigen::VectorXd::Zero(model.n_features);
  return mean / total;
}

}  // namespace finsight::learn
