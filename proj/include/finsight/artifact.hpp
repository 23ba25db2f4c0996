#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "finsight/date.hpp"
#include "finsight/features.hpp"
#include "finsight/learn.hpp"

namespace finsight::app {

inline constexpr int kArtifactVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);

// One trained model with everything needed to reproduce its predictions:
// the serialized model, the fitted encoders, the class vocabulary, and the
// date origin the timely task measures its date feature from.
struct ModelArtifact {
  features::Task task = features::Task::timely;
  std::string model_kind;  // dt | rf | gbt | lr | svm
  nlohmann::ordered_json model;
  features::EncoderSet encoders;
  std::vector<std::string> class_names;
  Date date_origin{};
  std::uint64_t seed = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::string created;  // ISO-8601 UTC
};

// On disk: {"format_version", "checksum", "payload"} where checksum is FNV-1a
// 64 of the serialized payload. Unknown versions raise VersionUnsupported
// before the checksum is looked at; any mismatch or parse failure is Corrupt.
void save_model(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model(const std::string& path);

nlohmann::ordered_json to_json(const learn::DecisionTreeModel& model);
nlohmann::ordered_json to_json(const learn::RandomForestModel& model);
nlohmann::ordered_json to_json(const learn::GbtModel& model);
nlohmann::ordered_json to_json(const learn::LinearModel& model);

learn::DecisionTreeModel tree_from_json(const nlohmann::json& doc);
learn::RandomForestModel forest_from_json(const nlohmann::json& doc);
learn::GbtModel gbt_from_json(const nlohmann::json& doc);
learn::LinearModel linear_from_json(const nlohmann::json& doc);

}  // namespace finsight::app
