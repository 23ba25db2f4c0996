#include <cmath>
#include <iomanip>
#include <sstream>

#include "finsight/date.hpp"
#include "finsight/report.hpp"

namespace finsight::app {

namespace {

using nlohmann::ordered_json;

std::string pad_left(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

std::string pad_right(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

std::string fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

std::string rule(char ch, std::size_t width) { return std::string(width, ch); }

const char* task_label(features::Task task) {
  return task == features::Task::timely ? "timely_response (binary)"
                                        : "company_response (multiclass)";
}

void render_confusion(std::ostringstream& out, const ModelEvaluation& eval) {
  const auto& cm = eval.confusion;
  std::size_t name_width = 4;
  for (const auto& name : cm.class_names) name_width = std::max(name_width, name.size());

  // Columns carry indices only; they follow the row order, which is named.
  out << "Confusion matrix [" << eval.model << "] (rows = truth, columns in row order):\n";
  out << pad_right("", name_width + 2);
  for (int c = 0; c < cm.num_classes(); ++c) {
    out << pad_left("[" + std::to_string(c) + "]", 9);
  }
  out << "\n";
  for (int r = 0; r < cm.num_classes(); ++r) {
    const std::string name =
        cm.class_names.empty() ? "[" + std::to_string(r) + "]" : cm.class_names[r];
    out << pad_right(name, name_width + 2);
    for (int c = 0; c < cm.num_classes(); ++c) {
      out << pad_left(std::to_string(cm.cells(r, c)), 9);
    }
    out << "\n";
  }
}

void render_importance(std::ostringstream& out, const TaskReport& task,
                       const ModelEvaluation& eval) {
  if (eval.importance.size() == 0) return;
  out << "Feature importance [" << eval.model << "]:";
  for (Eigen::Index f = 0; f < eval.importance.size(); ++f) {
    out << (f == 0 ? " " : ", ") << task.feature_names[static_cast<std::size_t>(f)] << " "
        << fixed(eval.importance[f], 4);
  }
  out << "\n";
}

void render_binary_task(std::ostringstream& out, const TaskReport& task) {
  constexpr std::size_t kLabelWidth = 20;
  constexpr std::size_t kCellWidth = 11;

  out << pad_right("Metric", kLabelWidth);
  for (const auto& model : task.models) out << pad_left(model.model, kCellWidth);
  out << "\n";

  const auto metric_row = [&](const std::string& label, auto getter) {
    out << pad_right(label, kLabelWidth);
    for (const auto& model : task.models) out << pad_left(getter(model), kCellWidth);
    out << "\n";
  };
  metric_row("Precision", [](const ModelEvaluation& m) { return fixed(m.precision, 4); });
  metric_row("Recall", [](const ModelEvaluation& m) { return fixed(m.recall, 4); });
  metric_row("AUC", [](const ModelEvaluation& m) {
    return m.auc ? fixed(*m.auc, 4) : std::string("-");
  });
  metric_row("Computing Time (s)",
             [](const ModelEvaluation& m) { return fixed(m.wall_seconds, 2); });
}

void render_multiclass_task(std::ostringstream& out, const TaskReport& task) {
  std::size_t name_width = 8;
  for (const auto& name : task.class_names) name_width = std::max(name_width, name.size());
  name_width += 2;
  constexpr std::size_t kCellWidth = 11;

  out << pad_right("", name_width);
  for (const auto& model : task.models) {
    out << pad_left(model.model, kCellWidth) << pad_left("", kCellWidth);
  }
  out << "\n";
  out << pad_right("Category", name_width);
  for (std::size_t m = 0; m < task.models.size(); ++m) {
    out << pad_left("Precision", kCellWidth) << pad_left("Recall", kCellWidth);
  }
  out << "\n";

  for (std::size_t c = 0; c < task.class_names.size(); ++c) {
    out << pad_right(task.class_names[c], name_width);
    for (const auto& model : task.models) {
      out << pad_left(fixed(model.per_class[c].precision, 4), kCellWidth)
          << pad_left(fixed(model.per_class[c].recall, 4), kCellWidth);
    }
    out << "\n";
  }
  out << pad_right("Computing Time (s)", name_width);
  for (const auto& model : task.models) {
    out << pad_left(fixed(model.wall_seconds, 2), kCellWidth) << pad_left("", kCellWidth);
  }
  out << "\n";
}

}  // namespace

nlohmann::ordered_json summary_to_json(const ingest::DatasetSummary& summary) {
  ordered_json doc;
  doc["rows"] = summary.row_count;
  doc["row_errors"] = summary.row_errors;
  doc["missing"] = ordered_json(std::map<std::string, std::size_t>(summary.missing_counts.begin(),
                                                                   summary.missing_counts.end()));
  doc["cardinality"] = ordered_json(
      std::map<std::string, std::size_t>(summary.cardinality.begin(), summary.cardinality.end()));
  ordered_json timely;
  for (const auto& [name, count] : summary.timely_counts) timely[name] = count;
  timely["missing"] = summary.timely_missing;
  doc["timely"] = std::move(timely);
  ordered_json response;
  for (const auto& [name, count] : summary.response_counts) response[name] = count;
  doc["response"] = std::move(response);
  doc["response_missing"] = summary.response_missing;
  doc["first_date_received"] =
      summary.first_date_received ? ordered_json(format_date(*summary.first_date_received))
                                  : ordered_json(nullptr);
  doc["last_date_received"] =
      summary.last_date_received ? ordered_json(format_date(*summary.last_date_received))
                                 : ordered_json(nullptr);
  doc["date_order_violations"] = summary.date_order_violations;
  return doc;
}

std::string render_summary_text(const ingest::DatasetSummary& summary) {
  std::ostringstream out;
  out << "Dataset\n" << rule('-', 7) << "\n";
  out << "rows ingested          " << summary.row_count << "\n";
  out << "row errors             " << summary.row_errors << "\n";
  if (summary.first_date_received && summary.last_date_received) {
    out << "date_received range    " << format_date(*summary.first_date_received) << " .. "
        << format_date(*summary.last_date_received) << "\n";
  }
  out << "date order violations  " << summary.date_order_violations << "\n\n";

  out << pad_right("field", 18) << pad_left("missing", 10) << pad_left("distinct", 10) << "\n";
  for (const auto& [field, missing] : summary.missing_counts) {
    out << pad_right(field, 18) << pad_left(std::to_string(missing), 10);
    const auto card = summary.cardinality.find(field);
    out << pad_left(card != summary.cardinality.end() ? std::to_string(card->second) : "-", 10)
        << "\n";
  }
  out << "\n";

  out << "timely_response:";
  for (const auto& [name, count] : summary.timely_counts) {
    out << " " << name << " " << count;
  }
  out << " (missing " << summary.timely_missing << ")\n";
  out << "company_response:\n";
  for (const auto& [name, count] : summary.response_counts) {
    out << "  " << pad_right(name, 42) << pad_left(std::to_string(count), 8) << "\n";
  }
  out << "  " << pad_right("(missing)", 42)
      << pad_left(std::to_string(summary.response_missing), 8) << "\n";
  return out.str();
}

std::string render_report_text(const RunReport& report) {
  std::ostringstream out;
  out << "Consumer complaint analytics run report\n";
  out << rule('=', 39) << "\n\n";

  out << render_summary_text(report.dataset) << "\n";

  out << "Split\n" << rule('-', 5) << "\n";
  out << "total rows " << report.total_rows << ", train " << report.train_rows << ", test "
      << report.test_rows << "; encoders fitted on " << report.encoder_fitted_rows << " rows\n\n";

  for (const TaskReport& task : report.tasks) {
    const std::string title = std::string("Task: ") + task_label(task.task);
    out << title << "\n" << rule('-', title.size()) << "\n";
    out << "train rows " << task.train_rows << " -> " << task.resampled_rows
        << " after resampling (" << task.resampling << "), test rows " << task.test_rows << "\n";
    if (task.dropped_train + task.dropped_test > 0) {
      out << "rows without a target dropped: " << task.dropped_train << " train, "
          << task.dropped_test << " test\n";
    }
    out << "\n";

    if (task.class_names.size() == 2) {
      render_binary_task(out, task);
    } else {
      render_multiclass_task(out, task);
    }
    out << "\n";
    for (const ModelEvaluation& eval : task.models) {
      render_confusion(out, eval);
      out << "\n";
    }
    for (const ModelEvaluation& eval : task.models) render_importance(out, task, eval);
    out << "\n";
  }

  if (report.topics) out << render_topics_text(*report.topics);
  return out.str();
}

std::string render_topics_text(const TopicsReport& topics) {
  std::ostringstream out;
  const std::string heading = "Topics (K = " + std::to_string(topics.summaries.size()) + ")";
  out << heading << "\n" << rule('-', heading.size()) << "\n";
  out << "documents " << topics.documents << ", vocabulary " << topics.vocabulary << ", tokens "
      << topics.tokens << ", perplexity " << fixed(topics.perplexity, 2) << "\n\n";
  for (const TopicSummary& topic : topics.summaries) {
    out << "Topic " << topic.topic << " (share " << fixed(topic.token_share, 3) << "):";
    for (const auto& [word, prob] : topic.words) {
      out << " " << word << " (" << fixed(prob, 3) << ")";
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::ordered_json evaluation_to_json(const ModelEvaluation& eval,
                                          const std::vector<std::string>& feature_names) {
  ordered_json doc;
  doc["model"] = eval.model;
  doc["precision"] = eval.precision;
  doc["recall"] = eval.recall;
  doc["auc"] = eval.auc ? ordered_json(*eval.auc) : ordered_json(nullptr);
  ordered_json per_class = ordered_json::array();
  for (const auto& cls : eval.per_class) {
    per_class.push_back(ordered_json{{"class", cls.name},
                                     {"precision", cls.precision},
                                     {"recall", cls.recall},
                                     {"support", cls.support}});
  }
  doc["per_class"] = std::move(per_class);
  ordered_json confusion = ordered_json::array();
  for (int r = 0; r < eval.confusion.num_classes(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < eval.confusion.num_classes(); ++c) {
      row.push_back(eval.confusion.cells(r, c));
    }
    confusion.push_back(std::move(row));
  }
  doc["confusion"] = std::move(confusion);
  if (eval.importance.size() > 0) {
    ordered_json importance;
    for (Eigen::Index f = 0; f < eval.importance.size(); ++f) {
      importance[feature_names[static_cast<std::size_t>(f)]] = eval.importance[f];
    }
    doc["importance"] = std::move(importance);
  } else {
    doc["importance"] = nullptr;
  }
  return doc;
}

std::string render_evaluation_text(const ModelEvaluation& eval,
                                   const std::vector<std::string>& feature_names) {
  std::ostringstream out;
  out << "Model: " << eval.model << "\n";
  out << "precision " << fixed(eval.precision, 4) << ", recall " << fixed(eval.recall, 4);
  if (eval.auc) out << ", AUC " << fixed(*eval.auc, 4);
  out << "\n";
  if (eval.per_class.size() > 2) {
    constexpr std::size_t kCellWidth = 11;
    std::size_t name_width = 8;
    for (const auto& cls : eval.per_class) name_width = std::max(name_width, cls.name.size());
    out << pad_right("Category", name_width + 2) << pad_left("Precision", kCellWidth)
        << pad_left("Recall", kCellWidth) << pad_left("Support", kCellWidth) << "\n";
    for (const auto& cls : eval.per_class) {
      out << pad_right(cls.name, name_width + 2) << pad_left(fixed(cls.precision, 4), kCellWidth)
          << pad_left(fixed(cls.recall, 4), kCellWidth)
          << pad_left(std::to_string(cls.support), kCellWidth) << "\n";
    }
  }
  render_confusion(out, eval);
  if (eval.importance.size() > 0) {
    out << "Feature importance:";
    for (Eigen::Index f = 0; f < eval.importance.size(); ++f) {
      out << (f == 0 ? " " : ", ") << feature_names[static_cast<std::size_t>(f)] << " "
          << fixed(eval.importance[f], 4);
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::ordered_json render_report_machine(const RunReport& report) {
  ordered_json doc;
  doc["config"] = report.config_echo;
  doc["dataset"] = summary_to_json(report.dataset);
  doc["split"] = ordered_json{{"total_rows", report.total_rows},
                              {"train_rows", report.train_rows},
                              {"test_rows", report.test_rows},
                              {"encoder_fitted_rows", report.encoder_fitted_rows}};

  ordered_json tasks = ordered_json::array();
  for (const TaskReport& task : report.tasks) {
    ordered_json task_doc;
    task_doc["task"] = features::to_string(task.task);
    task_doc["class_names"] = task.class_names;
    task_doc["feature_names"] = task.feature_names;
    task_doc["resampling"] = task.resampling;
    task_doc["train_rows"] = task.train_rows;
    task_doc["resampled_rows"] = task.resampled_rows;
    task_doc["test_rows"] = task.test_rows;
    task_doc["dropped_missing_target"] =
        ordered_json{{"train", task.dropped_train}, {"test", task.dropped_test}};

    ordered_json models = ordered_json::array();
    for (const ModelEvaluation& eval : task.models) {
      models.push_back(evaluation_to_json(eval, task.feature_names));
    }
    task_doc["models"] = std::move(models);
    tasks.push_back(std::move(task_doc));
  }
  doc["tasks"] = std::move(tasks);

  if (report.topics) doc["topics"] = topics_to_json(*report.topics);
  return doc;
}

nlohmann::ordered_json topics_to_json(const TopicsReport& topics) {
  ordered_json doc;
  doc["documents"] = topics.documents;
  doc["vocabulary"] = topics.vocabulary;
  doc["tokens"] = topics.tokens;
  doc["perplexity"] = topics.perplexity;
  doc["log_likelihood"] = topics.log_likelihood;
  ordered_json entries = ordered_json::array();
  for (const TopicSummary& topic : topics.summaries) {
    ordered_json words = ordered_json::array();
    for (const auto& [word, prob] : topic.words) {
      words.push_back(ordered_json{{"word", word}, {"prob", prob}});
    }
    entries.push_back(ordered_json{{"topic", topic.topic},
                                   {"token_share", topic.token_share},
                                   {"words", std::move(words)}});
  }
  doc["topics"] = std::move(entries);
  return doc;
}

std::string render_report(const RunReport& report, bool machine) {
  if (machine) return render_report_machine(report).dump(2) + "\n";
  return render_report_text(report);
}

ingest::DatasetSummary summary_from_json(const nlohmann::ordered_json& doc) {
  using nlohmann::json;
  try {
    ingest::DatasetSummary summary;
    summary.row_count = doc.at("rows").get<std::size_t>();
    summary.row_errors = doc.at("row_errors").get<std::size_t>();
    for (const auto& [field, count] : doc.at("missing").items()) {
      summary.missing_counts[field] = count.get<std::size_t>();
    }
    for (const auto& [field, count] : doc.at("cardinality").items()) {
      summary.cardinality[field] = count.get<std::size_t>();
    }
    for (const auto& [name, count] : doc.at("timely").items()) {
      if (name == "missing") {
        summary.timely_missing = count.get<std::size_t>();
      } else {
        summary.timely_counts[name] = count.get<std::size_t>();
      }
    }
    for (const auto& [name, count] : doc.at("response").items()) {
      summary.response_counts[name] = count.get<std::size_t>();
    }
    summary.response_missing = doc.at("response_missing").get<std::size_t>();
    if (!doc.at("first_date_received").is_null()) {
      summary.first_date_received = parse_date(doc.at("first_date_received").get<std::string>());
    }
    if (!doc.at("last_date_received").is_null()) {
      summary.last_date_received = parse_date(doc.at("last_date_received").get<std::string>());
    }
    summary.date_order_violations = doc.at("date_order_violations").get<std::size_t>();
    return summary;
  } catch (const json::exception& e) {
    raise(Errc::corrupt, std::string("report dataset section malformed: ") + e.what());
  }
}

RunReport report_from_json(const nlohmann::ordered_json& doc) {
  using nlohmann::json;
  try {
    RunReport report;
    report.config_echo = doc.at("config");
    report.dataset = summary_from_json(doc.at("dataset"));
    const ordered_json& split = doc.at("split");
    report.total_rows = split.at("total_rows").get<std::size_t>();
    report.train_rows = split.at("train_rows").get<std::size_t>();
    report.test_rows = split.at("test_rows").get<std::size_t>();
    report.encoder_fitted_rows = split.at("encoder_fitted_rows").get<std::size_t>();

    for (const ordered_json& task_doc : doc.at("tasks")) {
      TaskReport task;
      const auto parsed = features::task_from_string(task_doc.at("task").get<std::string>());
      if (!parsed) raise(Errc::corrupt, "report names an unknown task");
      task.task = *parsed;
      task.class_names = task_doc.at("class_names").get<std::vector<std::string>>();
      task.feature_names = task_doc.at("feature_names").get<std::vector<std::string>>();
      task.resampling = task_doc.at("resampling").get<std::string>();
      task.train_rows = task_doc.at("train_rows").get<std::size_t>();
      task.resampled_rows = task_doc.at("resampled_rows").get<std::size_t>();
      task.test_rows = task_doc.at("test_rows").get<std::size_t>();
      task.dropped_train = task_doc.at("dropped_missing_target").at("train").get<std::size_t>();
      task.dropped_test = task_doc.at("dropped_missing_target").at("test").get<std::size_t>();

      for (const ordered_json& model_doc : task_doc.at("models")) {
        ModelEvaluation eval;
        eval.model = model_doc.at("model").get<std::string>();
        eval.precision = model_doc.at("precision").get<double>();
        eval.recall = model_doc.at("recall").get<double>();
        if (!model_doc.at("auc").is_null()) eval.auc = model_doc.at("auc").get<double>();
        for (const ordered_json& cls : model_doc.at("per_class")) {
          metrics::ClassMetrics parsed_cls;
          parsed_cls.name = cls.at("class").get<std::string>();
          parsed_cls.precision = cls.at("precision").get<double>();
          parsed_cls.recall = cls.at("recall").get<double>();
          parsed_cls.support = cls.at("support").get<long>();
          eval.per_class.push_back(std::move(parsed_cls));
        }
        const ordered_json& confusion = model_doc.at("confusion");
        const int k = static_cast<int>(confusion.size());
        eval.confusion.class_names = task.class_names;
        eval.confusion.cells = Eigen::MatrixXi::Zero(k, k);
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) {
            eval.confusion.cells(r, c) = confusion.at(r).at(c).get<int>();
          }
        }
        const ordered_json& importance = model_doc.at("importance");
        if (!importance.is_null()) {
          eval.importance = Eigen::VectorXd::Zero(
              static_cast<Eigen::Index>(task.feature_names.size()));
          for (std::size_t f = 0; f < task.feature_names.size(); ++f) {
            eval.importance[static_cast<Eigen::Index>(f)] =
                importance.at(task.feature_names[f]).get<double>();
          }
        }
        task.models.push_back(std::move(eval));
      }
      report.tasks.push_back(std::move(task));
    }

    if (doc.contains("topics")) {
      const ordered_json& topics_doc = doc.at("topics");
      TopicsReport topics;
      topics.documents = topics_doc.at("documents").get<std::size_t>();
      topics.vocabulary = topics_doc.at("vocabulary").get<std::size_t>();
      topics.tokens = topics_doc.at("tokens").get<std::size_t>();
      topics.perplexity = topics_doc.at("perplexity").get<double>();
      topics.log_likelihood = topics_doc.at("log_likelihood").get<double>();
      for (const ordered_json& entry : topics_doc.at("topics")) {
        TopicSummary summary;
        summary.topic = entry.at("topic").get<int>();
        summary.token_share = entry.at("token_share").get<double>();
        for (const ordered_json& word : entry.at("words")) {
          summary.words.emplace_back(word.at("word").get<std::string>(),
                                     word.at("prob").get<double>());
        }
        topics.summaries.push_back(std::move(summary));
      }
      report.topics = std::move(topics);
    }
    return report;
  } catch (const json::exception& e) {
    raise(Errc::corrupt, std::string("report document malformed: ") + e.what());
  }
}

}  // namespace finsight::app
