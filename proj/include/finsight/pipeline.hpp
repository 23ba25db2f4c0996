#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finsight/artifact.hpp"
#include "finsight/config.hpp"
#include "finsight/report.hpp"

namespace finsight::app {

// The reference point for the timely task's date feature (whole days since).
// Stored in every artifact so prediction uses the same origin as training.
Date date_origin();

struct PipelineResult {
  RunReport report;
  std::vector<std::string> artifact_paths;  // one per trained model
  std::string text_report_path;
  std::string machine_report_path;
};

// ingest -> summarize -> split -> fit encoders on the train side -> per task:
// encode, resample, train, evaluate on the untouched test side -> topics over
// all narratives -> write artifacts and both report renderings. Deterministic
// per (config, seed) except for wall times, which stay out of the machine
// report. On failure every partially written output is removed and the error
// is rethrown with the failing stage prefixed.
PipelineResult run_pipeline(const PipelineConfig& config);

// Topic-model half of the pipeline: tokenizes every non-empty narrative, fits
// the model, and summarizes it. Returns nothing when no record carries a
// narrative. `seed` is the run seed; the stage derives its own stream from it.
std::optional<TopicsReport> run_topics_stage(
    const std::vector<ingest::ComplaintRecord>& records,
    const TopicsStageConfig& config, std::uint64_t seed);

// Evaluation half of the pipeline for a saved artifact against a data file:
// encodes with the artifact's encoders and reports metrics on every row.
ModelEvaluation evaluate_artifact(const ModelArtifact& artifact,
                                  const std::vector<ingest::ComplaintRecord>& records,
                                  double positive_threshold = 0.5);

struct Prediction {
  std::string complaint_id;
  int label = 0;
  std::string label_name;
  std::vector<double> probabilities;  // per class where the model provides them
};

// Batch prediction in input order; unseen categories encode to 0 like any
// other unseen label. svm probabilities are empty (margins only).
std::vector<Prediction> predict_records(const ModelArtifact& artifact,
                                        const std::vector<ingest::ComplaintRecord>& records,
                                        double positive_threshold = 0.5);

}  // namespace finsight::app
