#include <fstream>
#include <iomanip>
#include <sstream>

#include "finsight/artifact.hpp"
#include "finsight/error.hpp"

namespace finsight::app {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd json_to_vector(const json& doc) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(doc.size()));
  Eigen::Index i = 0;
  for (const auto& value : doc) out[i++] = value.get<double>();
  return out;
}

[[noreturn]] void corrupt(const std::string& detail) {
  raise(Errc::corrupt, detail);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

nlohmann::ordered_json to_json(const learn::DecisionTreeModel& model) {
  ordered_json nodes = ordered_json::array();
  for (const learn::TreeNode& node : model.nodes) {
    nodes.push_back(ordered_json::array(
        {node.feature, node.threshold, node.left, node.right, vector_to_json(node.class_counts)}));
  }
  return ordered_json{{"n_features", model.n_features},
                      {"n_classes", model.n_classes},
                      {"max_depth", model.params.max_depth},
                      {"min_leaf", model.params.min_leaf},
                      {"nodes", std::move(nodes)},
                      {"split_gain", vector_to_json(model.split_gain)}};
}

learn::DecisionTreeModel tree_from_json(const nlohmann::json& doc) {
  try {
    learn::DecisionTreeModel model;
    model.n_features = doc.at("n_features").get<int>();
    model.n_classes = doc.at("n_classes").get<int>();
    model.params.max_depth = doc.at("max_depth").get<int>();
    model.params.min_leaf = doc.at("min_leaf").get<int>();
    for (const auto& entry : doc.at("nodes")) {
      learn::TreeNode node;
      node.feature = entry.at(0).get<int>();
      node.threshold = entry.at(1).get<double>();
      node.left = entry.at(2).get<int>();
      node.right = entry.at(3).get<int>();
      node.class_counts = json_to_vector(entry.at(4));
      model.nodes.push_back(std::move(node));
    }
    model.split_gain = json_to_vector(doc.at("split_gain"));
    if (model.nodes.empty()) corrupt("decision tree payload has no nodes");
    return model;
  } catch (const json::exception& e) {
    corrupt(std::string("decision tree payload malformed: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const learn::RandomForestModel& model) {
  ordered_json trees = ordered_json::array();
  for (const learn::DecisionTreeModel& tree : model.trees) trees.push_back(to_json(tree));
  return ordered_json{{"max_features", model.max_features},
                      {"bootstrap", model.bootstrap},
                      {"n_features", model.n_features},
                      {"n_classes", model.n_classes},
                      {"tree_seeds", model.tree_seeds},
                      {"trees", std::move(trees)}};
}

learn::RandomForestModel forest_from_json(const nlohmann::json& doc) {
  try {
    learn::RandomForestModel model;
    model.max_features = doc.at("max_features").get<int>();
    model.bootstrap = doc.at("bootstrap").get<bool>();
    model.n_features = doc.at("n_features").get<int>();
    model.n_classes = doc.at("n_classes").get<int>();
    model.tree_seeds = doc.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& tree : doc.at("trees")) model.trees.push_back(tree_from_json(tree));
    if (model.trees.empty()) corrupt("forest payload has no trees");
    return model;
  } catch (const json::exception& e) {
    corrupt(std::string("forest payload malformed: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const learn::GbtModel& model) {
  ordered_json trees = ordered_json::array();
  for (const learn::RegressionTree& tree : model.trees) {
    ordered_json nodes = ordered_json::array();
    for (const learn::RegressionNode& node : tree.nodes) {
      nodes.push_back(ordered_json::array(
          {node.feature, node.threshold, node.left, node.right, node.value}));
    }
    trees.push_back(ordered_json{{"nodes", std::move(nodes)},
                                 {"split_gain", vector_to_json(tree.split_gain)}});
  }
  return ordered_json{{"base_score", model.base_score},
                      {"learning_rate", model.learning_rate},
                      {"n_features", model.n_features},
                      {"training_loss", model.training_loss},
                      {"trees", std::move(trees)}};
}

learn::GbtModel gbt_from_json(const nlohmann::json& doc) {
  try {
    learn::GbtModel model;
    model.base_score = doc.at("base_score").get<double>();
    model.learning_rate = doc.at("learning_rate").get<double>();
    model.n_features = doc.at("n_features").get<int>();
    model.training_loss = doc.at("training_loss").get<std::vector<double>>();
    for (const auto& tree_doc : doc.at("trees")) {
      learn::RegressionTree tree;
      for (const auto& entry : tree_doc.at("nodes")) {
        learn::RegressionNode node;
        node.feature = entry.at(0).get<int>();
        node.threshold = entry.at(1).get<double>();
        node.left = entry.at(2).get<int>();
        node.right = entry.at(3).get<int>();
        node.value = entry.at(4).get<double>();
        tree.nodes.push_back(node);
      }
      tree.split_gain = json_to_vector(tree_doc.at("split_gain"));
      if (tree.nodes.empty()) corrupt("regression tree payload has no nodes");
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const json::exception& e) {
    corrupt(std::string("gbt payload malformed: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const learn::LinearModel& model) {
  return ordered_json{
      {"kind", model.kind == learn::LinearKind::logistic ? "logistic" : "svm"},
      {"weights", vector_to_json(model.weights)},
      {"bias", model.bias}};
}

learn::LinearModel linear_from_json(const nlohmann::json& doc) {
  try {
    learn::LinearModel model;
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "logistic") {
      model.kind = learn::LinearKind::logistic;
    } else if (kind == "svm") {
      model.kind = learn::LinearKind::svm;
    } else {
      corrupt("unknown linear model kind \"" + kind + "\"");
    }
    model.weights = json_to_vector(doc.at("weights"));
    model.bias = doc.at("bias").get<double>();
    return model;
  } catch (const json::exception& e) {
    corrupt(std::string("linear payload malformed: ") + e.what());
  }
}

void save_model(const ModelArtifact& artifact, const std::string& path) {
  ordered_json encoders;
  for (const auto& [field, encoder] : artifact.encoders) {
    ordered_json table;
    for (const auto& [label, value] : encoder.table()) table[label] = value;
    encoders[field] = ordered_json{{"fitted_on", encoder.fitted_on()},
                                   {"table", std::move(table)}};
  }

  ordered_json payload;
  payload["task"] = features::to_string(artifact.task);
  payload["model_kind"] = artifact.model_kind;
  payload["class_names"] = artifact.class_names;
  payload["date_origin"] = format_date(artifact.date_origin);
  payload["seed"] = artifact.seed;
  payload["train_rows"] = artifact.train_rows;
  payload["test_rows"] = artifact.test_rows;
  payload["created"] = artifact.created;
  payload["encoders"] = std::move(encoders);
  payload["model"] = artifact.model;

  ordered_json file;
  file["format_version"] = kArtifactVersion;
  std::ostringstream checksum;
  checksum << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(payload.dump());
  file["checksum"] = checksum.str();
  file["payload"] = std::move(payload);

  std::ofstream out(path);
  if (!out) raise(Errc::io, "cannot write artifact " + path);
  out << file.dump(2) << "\n";
  if (!out) raise(Errc::io, "short write on artifact " + path);
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open artifact " + path);

  ordered_json file;
  try {
    in >> file;
  } catch (const json::exception& e) {
    corrupt("artifact " + path + " is not parseable: " + e.what());
  }
  if (!file.is_object() || !file.contains("format_version") ||
      !file.at("format_version").is_number_integer()) {
    corrupt("artifact " + path + " lacks a format version");
  }
  const int version = file.at("format_version").get<int>();
  if (version != kArtifactVersion) {
    raise(Errc::version_unsupported, "artifact " + path + " has format version " +
                                         std::to_string(version) + ", supported: " +
                                         std::to_string(kArtifactVersion));
  }
  if (!file.contains("checksum") || !file.contains("payload")) {
    corrupt("artifact " + path + " lacks checksum or payload");
  }
  const ordered_json& payload = file.at("payload");
  std::ostringstream checksum;
  checksum << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(payload.dump());
  if (checksum.str() != file.at("checksum").get<std::string>()) {
    corrupt("artifact " + path + " failed its checksum");
  }

  try {
    ModelArtifact artifact;
    const auto task = features::task_from_string(payload.at("task").get<std::string>());
    if (!task) corrupt("artifact " + path + " names an unknown task");
    artifact.task = *task;
    artifact.model_kind = payload.at("model_kind").get<std::string>();
    artifact.class_names = payload.at("class_names").get<std::vector<std::string>>();
    const auto origin = parse_date(payload.at("date_origin").get<std::string>());
    if (!origin) corrupt("artifact " + path + " has a malformed date origin");
    artifact.date_origin = *origin;
    artifact.seed = payload.at("seed").get<std::uint64_t>();
    artifact.train_rows = payload.at("train_rows").get<std::size_t>();
    artifact.test_rows = payload.at("test_rows").get<std::size_t>();
    artifact.created = payload.at("created").get<std::string>();
    for (const auto& [field, encoder] : payload.at("encoders").items()) {
      std::map<std::string, double> table;
      for (const auto& [label, value] : encoder.at("table").items()) {
        table[label] = value.get<double>();
      }
      artifact.encoders.emplace(field, features::FrequencyEncoder::from_table(
                                           std::move(table),
                                           encoder.at("fitted_on").get<std::size_t>()));
    }
    artifact.model = payload.at("model");
    return artifact;
  } catch (const json::exception& e) {
    corrupt("artifact " + path + " payload malformed: " + e.what());
  }
}

}  // namespace finsight::app
