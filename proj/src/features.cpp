#include "finsight/features.hpp"

#include <algorithm>
#include <cmath>

#include "finsight/rng.hpp"

namespace finsight::features {

FrequencyEncoder FrequencyEncoder::fit(const std::vector<std::string>& values) {
  FrequencyEncoder encoder;
  encoder.fitted_on_ = values.size();
  if (values.empty()) return encoder;
  std::map<std::string, std::size_t> counts;
  for (const auto& value : values) ++counts[value];
  const double total = static_cast<double>(values.size());
  for (const auto& [label, count] : counts) {
    encoder.table_[label] = static_cast<double>(count) / total;
  }
  return encoder;
}

FrequencyEncoder FrequencyEncoder::from_table(std::map<std::string, double> table,
                                              std::size_t fitted_on) {
  FrequencyEncoder encoder;
  encoder.table_ = std::move(table);
  encoder.fitted_on_ = fitted_on;
  return encoder;
}

double FrequencyEncoder::encode(const std::string& label) const {
  auto it = table_.find(label);
  return it != table_.end() ? it->second : 0.0;
}

const char* to_string(Task task) { return task == Task::timely ? "timely" : "response"; }

std::optional<Task> task_from_string(const std::string& text) {
  if (text == "timely") return Task::timely;
  if (text == "response") return Task::response;
  return std::nullopt;
}

TaskSpec TaskSpec::timely() {
  TaskSpec spec;
  spec.task = Task::timely;
  spec.feature_names = {ingest::field::company, ingest::field::product, ingest::field::issue,
                        ingest::field::state, ingest::field::date_sent};
  spec.class_names = {"No", "Yes"};  // positive class id 1
  return spec;
}

TaskSpec TaskSpec::response() {
  TaskSpec spec;
  spec.task = Task::response;
  spec.feature_names = {ingest::field::company, ingest::field::product, ingest::field::issue};
  spec.class_names = ingest::response_category_names();
  return spec;
}

TaskSpec TaskSpec::for_task(Task task) {
  return task == Task::timely ? timely() : response();
}

std::optional<int> TaskSpec::target_of(const ingest::ComplaintRecord& record) const {
  if (task == Task::timely) {
    switch (record.timely_response) {
      case ingest::Timely::yes: return 1;
      case ingest::Timely::no: return 0;
      case ingest::Timely::missing: return std::nullopt;
    }
    return std::nullopt;
  }
  if (!record.company_response) return std::nullopt;
  return static_cast<int>(*record.company_response);
}

namespace {

const std::string& field_value(const ingest::ComplaintRecord& record, const std::string& name) {
  if (name == ingest::field::company) return record.company;
  if (name == ingest::field::product) return record.product;
  if (name == ingest::field::issue) return record.issue;
  if (name == ingest::field::state) return record.state;
  raise(Errc::internal, "field '" + name + "' is not a categorical feature");
}

const FrequencyEncoder& encoder_for(const EncoderSet& encoders, const std::string& name) {
  auto it = encoders.find(name);
  if (it == encoders.end()) {
    raise(Errc::encoder_missing, "no encoder supplied for field '" + name + "'");
  }
  return it->second;
}

}  // namespace

EncoderSet fit_encoders(const std::vector<ingest::ComplaintRecord>& records) {
  EncoderSet encoders;
  for (const char* name :
       {ingest::field::company, ingest::field::product, ingest::field::issue, ingest::field::state}) {
    std::vector<std::string> values;
    values.reserve(records.size());
    for (const auto& record : records) {
      const std::string& value = field_value(record, name);
      values.push_back(value.empty() ? std::string(kMissingLabel) : value);
    }
    encoders.emplace(name, FrequencyEncoder::fit(values));
  }
  return encoders;
}

Eigen::RowVectorXd encode_record(const ingest::ComplaintRecord& record, const TaskSpec& task,
                                 const EncoderSet& encoders, const Date& date_origin) {
  Eigen::RowVectorXd row(task.feature_count());
  for (int j = 0; j < task.feature_count(); ++j) {
    const std::string& name = task.feature_names[static_cast<std::size_t>(j)];
    if (name == ingest::field::date_sent) {
      row[j] = record.date_sent
                   ? static_cast<double>(days_between(date_origin, *record.date_sent))
                   : 0.0;
      continue;
    }
    const FrequencyEncoder& encoder = encoder_for(encoders, name);
    const std::string& value = field_value(record, name);
    row[j] = value.empty() ? encoder.encode_missing() : encoder.encode(value);
  }
  return row;
}

EncodedDataset build_features(const std::vector<ingest::ComplaintRecord>& records,
                              const TaskSpec& task, const EncoderSet& encoders,
                              const Date& date_origin) {
  // Check encoder coverage up front so the error does not depend on the data.
  for (const auto& name : task.feature_names) {
    if (name != ingest::field::date_sent) encoder_for(encoders, name);
  }

  EncodedDataset dataset;
  dataset.task = task;
  dataset.class_names = task.class_names;

  std::vector<std::size_t> kept;
  kept.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (task.target_of(records[i]).has_value()) {
      kept.push_back(i);
    } else {
      ++dataset.dropped_missing_target;
    }
  }

  dataset.matrix.resize(static_cast<Eigen::Index>(kept.size()), task.feature_count());
  dataset.labels.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto& record = records[kept[r]];
    dataset.matrix.row(static_cast<Eigen::Index>(r)) =
        encode_record(record, task, encoders, date_origin);
    dataset.labels[static_cast<Eigen::Index>(r)] = *task.target_of(record);
  }
  return dataset;
}

SplitIndices train_test_split(std::size_t n_rows, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    raise(Errc::bad_ratio, "split ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  Rng rng(seed);
  const std::vector<std::size_t> perm = random_permutation(n_rows, rng);
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(n_rows)));
  SplitIndices split;
  split.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(
    const Eigen::Ref<const Eigen::VectorXi>& labels) {
  int max_label = -1;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) raise(Errc::id_out_of_range, "negative class id");
    max_label = std::max(max_label, labels[i]);
  }
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(max_label + 1));
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    groups[static_cast<std::size_t>(labels[i])].push_back(static_cast<std::size_t>(i));
  }
  return groups;
}

}  // namespace

std::vector<std::size_t> oversample(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                    std::uint64_t seed) {
  std::vector<std::size_t> out(static_cast<std::size_t>(labels.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  if (labels.size() == 0) return out;

  const auto groups = indices_by_class(labels);
  std::size_t max_count = 0;
  for (const auto& group : groups) max_count = std::max(max_count, group.size());

  Rng rng(seed);
  for (const auto& group : groups) {
    if (group.empty()) continue;
    for (std::size_t extra = group.size(); extra < max_count; ++extra) {
      out.push_back(group[uniform_below(rng, group.size())]);
    }
  }
  return out;
}

std::vector<std::size_t> undersample(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                     std::size_t cap, std::uint64_t seed) {
  if (cap < 1) raise(Errc::bad_config, "undersample cap must be >= 1");
  auto groups = indices_by_class(labels);
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (auto& group : groups) {
    if (group.size() > cap) {
      // Partial Fisher-Yates: the first `cap` entries are a uniform sample
      // without replacement.
      for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j = i + uniform_below(rng, group.size() - i);
        std::swap(group[i], group[j]);
      }
      group.resize(cap);
    }
    out.insert(out.end(), group.begin(), group.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

const char* to_string(ResamplePolicy policy) {
  switch (policy) {
    case ResamplePolicy::none: return "none";
    case ResamplePolicy::oversample: return "oversample";
    case ResamplePolicy::undersample: return "undersample";
    case ResamplePolicy::median_balance: return "median_balance";
  }
  return "none";
}

std::optional<ResamplePolicy> resample_policy_from_string(const std::string& text) {
  if (text == "none") return ResamplePolicy::none;
  if (text == "oversample") return ResamplePolicy::oversample;
  if (text == "undersample") return ResamplePolicy::undersample;
  if (text == "median_balance") return ResamplePolicy::median_balance;
  return std::nullopt;
}

std::vector<std::size_t> apply_resampling(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                          const ResampleConfig& config, std::uint64_t seed) {
  switch (config.policy) {
    case ResamplePolicy::none: {
      std::vector<std::size_t> all(static_cast<std::size_t>(labels.size()));
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      return all;
    }
    case ResamplePolicy::oversample:
      return oversample(labels, seed);
    case ResamplePolicy::undersample:
      return undersample(labels, config.cap, seed);
    case ResamplePolicy::median_balance: {
      if (labels.size() == 0) return {};
      std::vector<std::size_t> counts;
      for (const auto& group : indices_by_class(labels)) {
        if (!group.empty()) counts.push_back(group.size());
      }
      std::sort(counts.begin(), counts.end());
      const std::size_t median = counts[(counts.size() - 1) / 2];  // lower median

      const auto capped = undersample(labels, median, derive_seed(seed, 0));
      Eigen::VectorXi capped_labels(static_cast<Eigen::Index>(capped.size()));
      for (std::size_t i = 0; i < capped.size(); ++i) {
        capped_labels[static_cast<Eigen::Index>(i)] = labels[static_cast<Eigen::Index>(capped[i])];
      }
      const auto raised = oversample(capped_labels, derive_seed(seed, 1));
      std::vector<std::size_t> out;
      out.reserve(raised.size());
      for (std::size_t i : raised) out.push_back(capped[i]);
      return out;
    }
  }
  raise(Errc::internal, "unknown resample policy");
}

EncodedDataset take_rows(const EncodedDataset& dataset, const std::vector<std::size_t>& rows) {
  EncodedDataset out;
  out.task = dataset.task;
  out.class_names = dataset.class_names;
  out.matrix.resize(static_cast<Eigen::Index>(rows.size()), dataset.matrix.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.matrix.row(static_cast<Eigen::Index>(i)) =
        dataset.matrix.row(static_cast<Eigen::Index>(rows[i]));
    out.labels[static_cast<Eigen::Index>(i)] = dataset.labels[static_cast<Eigen::Index>(rows[i])];
  }
  return out;
}

}  // namespace finsight::features
