#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsight/features.hpp"
#include "finsight/ingest.hpp"
#include "finsight/learn.hpp"
#include "finsight/topics.hpp"

namespace finsight::app {

// Model kinds accepted in task model lists. gbt, lr and svm are binary-only
// and are rejected for the response task at validation time.
const std::vector<std::string>& known_model_kinds();  // dt, rf, gbt, lr, svm

struct TaskStageConfig {
  bool enabled = true;
  features::ResampleConfig resampling;
  std::vector<std::string> models;
};

struct TopicsStageConfig {
  bool enabled = true;
  int topic_count = 10;
  double alpha = 0.0;  // 0 resolves to 50 / topic_count
  double beta = 0.01;
  int sweeps = 200;
  int min_df = 5;
  double max_df_fraction = 0.5;
  int max_vocab = 50000;
  int top_words = 10;
  std::string stopword_path;  // empty = built-in list

  topics::LdaConfig lda(std::uint64_t seed) const;
};

struct PipelineConfig {
  std::string input_path;
  std::string schema_path;  // empty = stock CFPB mapping
  ingest::SourceFormat format = ingest::SourceFormat::csv;
  bool strict = false;
  std::uint64_t seed = 0;
  double split_ratio = 0.7;
  double positive_threshold = 0.5;  // timely probability cutoff
  std::string out_dir = "out";
  TaskStageConfig timely{true, {}, {"gbt", "lr", "svm"}};
  TaskStageConfig response{true, {}, {"rf", "dt"}};
  learn::TrainConfig train;
  TopicsStageConfig topics;

  void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& doc);

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& config, const std::string& path);

}  // namespace finsight::app
