#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finsight/date.hpp"
#include "finsight/ingest.hpp"

namespace finsight::features {

// Reserved label standing in for an absent categorical value. It takes part
// in fitting like any other label, so "the field was empty" stays visible to
// the models.
inline constexpr const char* kMissingLabel = "__MISSING__";

// Category -> relative frequency in the fitting data. Lookups of labels never
// seen while fitting yield exactly 0.
class FrequencyEncoder {
 public:
  FrequencyEncoder() = default;

  static FrequencyEncoder fit(const std::vector<std::string>& values);
  static FrequencyEncoder from_table(std::map<std::string, double> table, std::size_t fitted_on);

  double encode(const std::string& label) const;
  double encode_missing() const { return encode(kMissingLabel); }

  std::size_t fitted_on() const { return fitted_on_; }
  const std::map<std::string, double>& table() const { return table_; }

 private:
  std::map<std::string, double> table_;
  std::size_t fitted_on_ = 0;
};

enum class Task { timely, response };

const char* to_string(Task task);
std::optional<Task> task_from_string(const std::string& text);

// Fixed, versioned feature order per task; vectors from the same TaskSpec
// always align index to index.
struct TaskSpec {
  Task task = Task::timely;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  static TaskSpec timely();    // [company, product, issue, state, date_sent]
  static TaskSpec response();  // [company, product, issue]
  static TaskSpec for_task(Task task);

  int feature_count() const { return static_cast<int>(feature_names.size()); }
  int num_classes() const { return static_cast<int>(class_names.size()); }
  bool uses_date() const { return task == Task::timely; }

  // Class id of the record's target; nullopt when the target is missing.
  std::optional<int> target_of(const ingest::ComplaintRecord& record) const;
};

struct EncodedDataset {
  Eigen::MatrixXd matrix;  // rows x task feature count
  Eigen::VectorXi labels;
  std::vector<std::string> class_names;
  TaskSpec task;
  std::size_t dropped_missing_target = 0;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
};

// Canonical field name -> fitted encoder.
using EncoderSet = std::map<std::string, FrequencyEncoder>;

// Fit one encoder per categorical feature field over the given records
// (training partition only, by contract). Missing values fit under
// kMissingLabel; fitted_on equals records.size() for every encoder.
EncoderSet fit_encoders(const std::vector<ingest::ComplaintRecord>& records);

// Encode records into the task's fixed feature order. The date feature is
// whole days since date_origin; a missing date_sent encodes to 0.0, the same
// "rarest end" value unseen categories get. Rows with a missing target are
// dropped and counted.
EncodedDataset build_features(const std::vector<ingest::ComplaintRecord>& records,
                              const TaskSpec& task, const EncoderSet& encoders,
                              const Date& date_origin);

// Feature vector for a single record (prediction path; no target needed).
Eigen::RowVectorXd encode_record(const ingest::ComplaintRecord& record, const TaskSpec& task,
                                 const EncoderSet& encoders, const Date& date_origin);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Uniform random partition by seed: floor(ratio * n) train rows, remainder
// test, both in ascending index order.
SplitIndices train_test_split(std::size_t n_rows, double ratio, std::uint64_t seed);

// Raise every class count to the max class count by uniform sampling with
// replacement; the original indices are all retained (first, in input order).
std::vector<std::size_t> oversample(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                    std::uint64_t seed);

// Reduce every class with more than `cap` rows to exactly `cap` by uniform
// sampling without replacement; smaller classes pass through. Ascending order.
std::vector<std::size_t> undersample(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                     std::size_t cap, std::uint64_t seed);

enum class ResamplePolicy { none, oversample, undersample, median_balance };

const char* to_string(ResamplePolicy policy);
std::optional<ResamplePolicy> resample_policy_from_string(const std::string& text);

struct ResampleConfig {
  ResamplePolicy policy = ResamplePolicy::none;
  std::size_t cap = 0;  // undersample only
};

// median_balance undersamples majority classes to the median class count and
// then oversamples the rest up to it, leaving every class at the median.
std::vector<std::size_t> apply_resampling(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                          const ResampleConfig& config, std::uint64_t seed);

// Row subset of a dataset (resampled view materialized).
EncodedDataset take_rows(const EncodedDataset& dataset, const std::vector<std::size_t>& rows);

}  // namespace finsight::features
