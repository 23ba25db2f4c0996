#include <algorithm>
#include <fstream>
#include <set>

#include "finsight/config.hpp"
#include "finsight/error.hpp"

namespace finsight::app {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void expect_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      raise(Errc::bad_config, "unknown key \"" + key + "\" in " + where);
    }
  }
}

template <typename T>
void read_into(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    raise(Errc::bad_config, std::string("bad value for \"") + key + "\"");
  }
}

TaskStageConfig read_task(const json& doc, const std::string& where, TaskStageConfig base) {
  expect_keys(doc, {"enabled", "resampling", "undersample_cap", "models"}, where);
  read_into(doc, "enabled", base.enabled);
  if (doc.contains("resampling")) {
    const auto text = doc.at("resampling").get<std::string>();
    const auto policy = features::resample_policy_from_string(text);
    if (!policy) raise(Errc::bad_config, "unknown resampling policy \"" + text + "\"");
    base.resampling.policy = *policy;
  }
  read_into(doc, "undersample_cap", base.resampling.cap);
  read_into(doc, "models", base.models);
  return base;
}

}  // namespace

const std::vector<std::string>& known_model_kinds() {
  static const std::vector<std::string> kinds = {"dt", "rf", "gbt", "lr", "svm"};
  return kinds;
}

topics::LdaConfig TopicsStageConfig::lda(std::uint64_t seed) const {
  topics::LdaConfig config;
  config.topics = topic_count;
  config.alpha = alpha;
  config.beta = beta;
  config.sweeps = sweeps;
  config.seed = seed;
  return config;
}

void PipelineConfig::validate() const {
  if (input_path.empty()) raise(Errc::bad_config, "input path is required");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    raise(Errc::bad_config, "split_ratio must lie in (0, 1)");
  }
  if (!(positive_threshold > 0.0 && positive_threshold < 1.0)) {
    raise(Errc::bad_config, "positive_threshold must lie in (0, 1)");
  }
  if (out_dir.empty()) raise(Errc::bad_config, "out_dir is required");

  const auto check_task = [](const TaskStageConfig& task, const std::string& name,
                             bool binary_only_allowed) {
    if (!task.enabled) return;
    if (task.models.empty()) raise(Errc::bad_config, name + ": no models requested");
    std::set<std::string> seen;
    for (const std::string& kind : task.models) {
      const auto& known = known_model_kinds();
      if (std::find(known.begin(), known.end(), kind) == known.end()) {
        raise(Errc::bad_config, name + ": unknown model kind \"" + kind + "\"");
      }
      if (!binary_only_allowed && kind != "dt" && kind != "rf") {
        raise(Errc::bad_config, name + ": \"" + kind + "\" handles binary targets only");
      }
      if (!seen.insert(kind).second) {
        raise(Errc::bad_config, name + ": model \"" + kind + "\" listed twice");
      }
    }
    if (task.resampling.policy == features::ResamplePolicy::undersample &&
        task.resampling.cap == 0) {
      raise(Errc::bad_config, name + ": undersampling needs undersample_cap >= 1");
    }
  };
  check_task(timely, "timely", true);
  check_task(response, "response", false);

  train.validate();

  if (topics.enabled) {
    if (topics.topic_count < 1) raise(Errc::bad_config, "topics: topic_count must be >= 1");
    if (topics.alpha < 0.0 || !(topics.beta > 0.0)) {
      raise(Errc::bad_config, "topics: alpha must be >= 0 and beta > 0");
    }
    if (topics.sweeps < 0 || topics.min_df < 1 || topics.max_vocab < 1 || topics.top_words < 0) {
      raise(Errc::bad_config, "topics: bad bounds");
    }
    if (!(topics.max_df_fraction > 0.0) || topics.max_df_fraction > 1.0) {
      raise(Errc::bad_config, "topics: max_df_fraction must lie in (0, 1]");
    }
  }
}

nlohmann::ordered_json to_json(const PipelineConfig& config) {
  const auto task_json = [](const TaskStageConfig& task) {
    ordered_json doc;
    doc["enabled"] = task.enabled;
    doc["resampling"] = features::to_string(task.resampling.policy);
    doc["undersample_cap"] = task.resampling.cap;
    doc["models"] = task.models;
    return doc;
  };

  ordered_json doc;
  doc["input"] = config.input_path;
  doc["schema"] = config.schema_path;
  doc["format"] = config.format == ingest::SourceFormat::csv ? "csv" : "jsonl";
  doc["strict"] = config.strict;
  doc["seed"] = config.seed;
  doc["split_ratio"] = config.split_ratio;
  doc["positive_threshold"] = config.positive_threshold;
  doc["out_dir"] = config.out_dir;
  doc["timely"] = task_json(config.timely);
  doc["response"] = task_json(config.response);
  doc["train"] = ordered_json{
      {"dt", {{"max_depth", config.train.dt.max_depth}, {"min_leaf", config.train.dt.min_leaf}}},
      {"rf",
       {{"n_trees", config.train.rf.n_trees},
        {"max_features", config.train.rf.max_features},
        {"bootstrap", config.train.rf.bootstrap},
        {"max_depth", config.train.rf.tree.max_depth},
        {"min_leaf", config.train.rf.tree.min_leaf}}},
      {"gbt",
       {{"n_rounds", config.train.gbt.n_rounds},
        {"learning_rate", config.train.gbt.learning_rate},
        {"max_depth", config.train.gbt.max_depth},
        {"min_leaf", config.train.gbt.min_leaf}}},
      {"lr",
       {{"epochs", config.train.lr.epochs},
        {"step", config.train.lr.step},
        {"l2", config.train.lr.l2}}},
      {"svm", {{"lambda", config.train.svm.lambda}, {"epochs", config.train.svm.epochs}}},
  };
  doc["topics"] = ordered_json{
      {"enabled", config.topics.enabled},
      {"topic_count", config.topics.topic_count},
      {"alpha", config.topics.alpha},
      {"beta", config.topics.beta},
      {"sweeps", config.topics.sweeps},
      {"min_df", config.topics.min_df},
      {"max_df_fraction", config.topics.max_df_fraction},
      {"max_vocab", config.topics.max_vocab},
      {"top_words", config.topics.top_words},
      {"stopwords", config.topics.stopword_path},
  };
  return doc;
}

PipelineConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) raise(Errc::bad_config, "config root must be an object");
  expect_keys(doc,
              {"input", "schema", "format", "strict", "seed", "split_ratio", "positive_threshold",
               "out_dir", "timely", "response", "train", "topics"},
              "config");

  PipelineConfig config;
  read_into(doc, "input", config.input_path);
  read_into(doc, "schema", config.schema_path);
  if (doc.contains("format")) {
    const auto text = doc.at("format").get<std::string>();
    if (text == "csv") {
      config.format = ingest::SourceFormat::csv;
    } else if (text == "jsonl") {
      config.format = ingest::SourceFormat::json_lines;
    } else {
      raise(Errc::bad_config, "format must be \"csv\" or \"jsonl\"");
    }
  }
  read_into(doc, "strict", config.strict);
  read_into(doc, "seed", config.seed);
  read_into(doc, "split_ratio", config.split_ratio);
  read_into(doc, "positive_threshold", config.positive_threshold);
  read_into(doc, "out_dir", config.out_dir);
  if (doc.contains("timely")) config.timely = read_task(doc.at("timely"), "timely", config.timely);
  if (doc.contains("response")) {
    config.response = read_task(doc.at("response"), "response", config.response);
  }

  if (doc.contains("train")) {
    const json& train = doc.at("train");
    expect_keys(train, {"dt", "rf", "gbt", "lr", "svm"}, "train");
    if (train.contains("dt")) {
      const json& dt = train.at("dt");
      expect_keys(dt, {"max_depth", "min_leaf"}, "train.dt");
      read_into(dt, "max_depth", config.train.dt.max_depth);
      read_into(dt, "min_leaf", config.train.dt.min_leaf);
    }
    if (train.contains("rf")) {
      const json& rf = train.at("rf");
      expect_keys(rf, {"n_trees", "max_features", "bootstrap", "max_depth", "min_leaf"},
                  "train.rf");
      read_into(rf, "n_trees", config.train.rf.n_trees);
      read_into(rf, "max_features", config.train.rf.max_features);
      read_into(rf, "bootstrap", config.train.rf.bootstrap);
      read_into(rf, "max_depth", config.train.rf.tree.max_depth);
      read_into(rf, "min_leaf", config.train.rf.tree.min_leaf);
    }
    if (train.contains("gbt")) {
      const json& gbt = train.at("gbt");
      expect_keys(gbt, {"n_rounds", "learning_rate", "max_depth", "min_leaf"}, "train.gbt");
      read_into(gbt, "n_rounds", config.train.gbt.n_rounds);
      read_into(gbt, "learning_rate", config.train.gbt.learning_rate);
      read_into(gbt, "max_depth", config.train.gbt.max_depth);
      read_into(gbt, "min_leaf", config.train.gbt.min_leaf);
    }
    if (train.contains("lr")) {
      const json& lr = train.at("lr");
      expect_keys(lr, {"epochs", "step", "l2"}, "train.lr");
      read_into(lr, "epochs", config.train.lr.epochs);
      read_into(lr, "step", config.train.lr.step);
      read_into(lr, "l2", config.train.lr.l2);
    }
    if (train.contains("svm")) {
      const json& svm = train.at("svm");
      expect_keys(svm, {"lambda", "epochs"}, "train.svm");
      read_into(svm, "lambda", config.train.svm.lambda);
      read_into(svm, "epochs", config.train.svm.epochs);
    }
  }

  if (doc.contains("topics")) {
    const json& topics = doc.at("topics");
    expect_keys(topics,
                {"enabled", "topic_count", "alpha", "beta", "sweeps", "min_df", "max_df_fraction",
                 "max_vocab", "top_words", "stopwords"},
                "topics");
    read_into(topics, "enabled", config.topics.enabled);
    read_into(topics, "topic_count", config.topics.topic_count);
    read_into(topics, "alpha", config.topics.alpha);
    read_into(topics, "beta", config.topics.beta);
    read_into(topics, "sweeps", config.topics.sweeps);
    read_into(topics, "min_df", config.topics.min_df);
    read_into(topics, "max_df_fraction", config.topics.max_df_fraction);
    read_into(topics, "max_vocab", config.topics.max_vocab);
    read_into(topics, "top_words", config.topics.top_words);
    read_into(topics, "stopwords", config.topics.stopword_path);
  }
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    raise(Errc::bad_config, "config parse error in " + path + ": " + e.what());
  }
  return config_from_json(doc);
}

void save_config(const PipelineConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::io, "cannot write config file " + path);
  out << to_json(config).dump(2) << "\n";
}

}  // namespace finsight::app
