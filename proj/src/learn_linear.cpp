#include <algorithm>
#include <cmath>
#include <numeric>

#include "finsight/error.hpp"
#include "finsight/learn.hpp"
#include "finsight/rng.hpp"

namespace finsight::learn {

namespace {

constexpr double kLogFloor = 1e-12;

void check_binary(const Eigen::VectorXi& labels) {
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      raise(Errc::not_binary, "label " + std::to_string(labels[i]) + " at row " +
                                  std::to_string(i) + "; expected 0 or 1");
    }
  }
}

}  // namespace

LogisticObjective logistic_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                     const Eigen::Ref<const Eigen::VectorXi>& y,
                                     const Eigen::Ref<const Eigen::VectorXd>& weights,
                                     double bias, double l2) {
  if (X.rows() != y.size()) raise(Errc::length_mismatch, "rows and labels disagree");
  if (X.cols() != weights.size()) raise(Errc::width_mismatch, "weights do not match feature count");
  const double n = static_cast<double>(X.rows());

  Eigen::VectorXd p = ((X * weights).array() + bias).unaryExpr([](double z) { return sigmoid(z); });

  double loss = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double q = std::clamp(p[i], kLogFloor, 1.0 - kLogFloor);
    loss += y[i] == 1 ? -std::log(q) : -std::log(1.0 - q);
  }
  loss = loss / n + 0.5 * l2 * weights.squaredNorm();

  const Eigen::VectorXd delta = p - y.cast<double>();
  LogisticObjective out;
  out.loss = loss;
  out.grad_weights = X.transpose() * delta / n + l2 * weights;
  out.grad_bias = delta.mean();
  return out;
}

LinearModel train_logistic(const features::EncodedDataset& dataset, const LrConfig& config) {
  if (dataset.rows() == 0) raise(Errc::empty_dataset, "no rows to train on");
  check_binary(dataset.labels);

  LinearModel model;
  model.kind = LinearKind::logistic;
  model.weights = Eigen::VectorXd::Zero(dataset.cols());
  model.bias = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const LogisticObjective obj =
        logistic_objective(dataset.matrix, dataset.labels, model.weights, model.bias, config.l2);
    model.weights -= config.step * obj.grad_weights;
    model.bias -= config.step * obj.grad_bias;
  }
  return model;
}

double svm_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXi>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& weights, double bias,
                     double lambda) {
  if (X.rows() != y.size()) raise(Errc::length_mismatch, "rows and labels disagree");
  if (X.cols() != weights.size()) raise(Errc::width_mismatch, "weights do not match feature count");
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double s = y[i] == 1 ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - s * (X.row(i).dot(weights) + bias));
  }
  return 0.5 * lambda * weights.squaredNorm() + hinge / static_cast<double>(y.size());
}

LinearModel train_linear_svm(const features::EncodedDataset& dataset, const SvmConfig& config,
                             std::uint64_t seed) {
  if (dataset.rows() == 0) raise(Errc::empty_dataset, "no rows to train on");
  check_binary(dataset.labels);

  const std::size_t n = static_cast<std::size_t>(dataset.rows());
  LinearModel model;
  model.kind = LinearKind::svm;
  model.weights = Eigen::VectorXd::Zero(dataset.cols());
  model.bias = 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng gen(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
    shuffle(order, gen);
    for (std::size_t idx : order) {
      const Eigen::Index i = static_cast<Eigen::Index>(idx);
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double s = dataset.labels[i] == 1 ? 1.0 : -1.0;
      const double margin = s * (dataset.matrix.row(i).dot(model.weights) + model.bias);
      // The bias rides along as a constant-one feature so it shares the decay;
      // without that its early 1/(lambda*t) steps never wash out.
      model.weights *= 1.0 - eta * config.lambda;
      model.bias *= 1.0 - eta * config.lambda;
      if (margin < 1.0) {
        model.weights += eta * s * dataset.matrix.row(i).transpose();
        model.bias += eta * s;
      }
    }
  }
  return model;
}

double linear_score(const LinearModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.weights.size()) {
    raise(Errc::width_mismatch, "input has " + std::to_string(x.size()) + " features, model wants " +
                                    std::to_string(model.weights.size()));
  }
  const double z = x.dot(model.weights) + model.bias;
  return model.kind == LinearKind::logistic ? sigmoid(z) : z;
}

int linear_predict(const LinearModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const double score = linear_score(model, x);
  return model.kind == LinearKind::logistic ? (score >= 0.5 ? 1 : 0) : (score >= 0.0 ? 1 : 0);
}

}  // namespace finsight::learn
