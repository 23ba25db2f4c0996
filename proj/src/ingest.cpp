#include "finsight/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "finsight/strings.hpp"

namespace finsight::ingest {

using nlohmann::json;

const std::vector<std::string>& canonical_fields() {
  static const std::vector<std::string> fields = {
      field::complaint_id, field::company,       field::product,
      field::issue,        field::state,         field::date_received,
      field::date_sent,    field::timely_response, field::company_response,
      field::narrative,
  };
  return fields;
}

bool is_required_field(const std::string& canonical) {
  return canonical != field::narrative;
}

void SchemaSpec::validate() const {
  for (const auto& canonical : canonical_fields()) {
    if (!is_required_field(canonical)) continue;
    auto it = column_map.find(canonical);
    if (it == column_map.end() || it->second.empty()) {
      raise(Errc::bad_config, "schema does not map required field '" + canonical + "'");
    }
  }
  std::map<std::string, std::string> seen;  // source -> canonical
  for (const auto& [canonical, source] : column_map) {
    if (canonical_fields().end() ==
        std::find(canonical_fields().begin(), canonical_fields().end(), canonical)) {
      raise(Errc::bad_config, "schema maps unknown field '" + canonical + "'");
    }
    auto [it, inserted] = seen.emplace(source, canonical);
    if (!inserted) {
      raise(Errc::bad_config, "source column '" + source + "' mapped by both '" + it->second +
                                  "' and '" + canonical + "'");
    }
  }
}

std::vector<std::string> SchemaSpec::source_header_order() const {
  std::vector<std::string> headers;
  for (const auto& canonical : canonical_fields()) {
    auto it = column_map.find(canonical);
    if (it != column_map.end()) headers.push_back(it->second);
  }
  return headers;
}

SchemaSpec SchemaSpec::cfpb_default() {
  SchemaSpec schema;
  schema.column_map = {
      {field::complaint_id, "Complaint ID"},
      {field::company, "Company"},
      {field::product, "Product"},
      {field::issue, "Issue"},
      {field::state, "State"},
      {field::date_received, "Date received"},
      {field::date_sent, "Date sent to company"},
      {field::timely_response, "Timely response?"},
      {field::company_response, "Company response to consumer"},
      {field::narrative, "Consumer complaint narrative"},
  };
  return schema;
}

SchemaSpec SchemaSpec::identity() {
  SchemaSpec schema;
  for (const auto& canonical : canonical_fields()) {
    schema.column_map[canonical] = canonical;
  }
  return schema;
}

SchemaSpec SchemaSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open schema file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    raise(Errc::bad_config, "schema file " + path.string() + " is not a JSON object");
  }
  SchemaSpec schema;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) {
      raise(Errc::bad_config, "schema entry '" + key + "' must map to a string");
    }
    schema.column_map[key] = value.get<std::string>();
  }
  schema.validate();
  return schema;
}

void SchemaSpec::save(const std::filesystem::path& path) const {
  json doc = json::object();
  for (const auto& [canonical, source] : column_map) doc[canonical] = source;
  std::ofstream out(path);
  if (!out) raise(Errc::io, "cannot write schema file " + path.string());
  out << doc.dump(2) << "\n";
}

const std::vector<std::string>& response_category_names() {
  static const std::vector<std::string> names = {
      "Closed with explanation",
      "Closed with non-monetary relief",
      "In progress",
      "Closed with monetary relief",
      "Closed without relief",
      "Closed",
      "Untimely response",
      "Closed with relief",
  };
  return names;
}

const std::string& to_string(ResponseCategory category) {
  return response_category_names().at(static_cast<std::size_t>(category));
}

std::optional<ResponseCategory> parse_response_category(const std::string& text) {
  const std::string normalized = to_lower(trim(text));
  const auto& names = response_category_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (normalized == to_lower(names[i])) return static_cast<ResponseCategory>(i);
  }
  return std::nullopt;
}

namespace {

RowError row_error(Errc code, std::string message) {
  return RowError{0, code, std::move(message)};
}

}  // namespace

RowResult parse_record(const std::map<std::string, std::string>& raw_row,
                       const SchemaSpec& schema) {
  auto cell = [&](const char* canonical) -> const std::string* {
    auto mapped = schema.column_map.find(canonical);
    if (mapped == schema.column_map.end()) return nullptr;
    auto it = raw_row.find(mapped->second);
    if (it == raw_row.end()) return nullptr;
    return &it->second;
  };

  ComplaintRecord record;

  const std::string* id = cell(field::complaint_id);
  if (id == nullptr || id->empty()) {
    return row_error(Errc::missing_field, "complaint_id is required");
  }
  record.complaint_id = *id;

  // Plain categoricals: an absent column or empty value is a missing value,
  // represented as the empty string.
  auto text_field = [&](const char* canonical, std::string ComplaintRecord::* member) {
    const std::string* value = cell(canonical);
    record.*member = value != nullptr ? *value : std::string{};
  };
  text_field(field::company, &ComplaintRecord::company);
  text_field(field::product, &ComplaintRecord::product);
  text_field(field::issue, &ComplaintRecord::issue);
  text_field(field::state, &ComplaintRecord::state);
  text_field(field::narrative, &ComplaintRecord::narrative);

  const std::string* received = cell(field::date_received);
  if (received == nullptr || received->empty()) {
    return row_error(Errc::missing_field, "date_received is required");
  }
  if (auto date = parse_date(*received)) {
    record.date_received = *date;
  } else {
    return row_error(Errc::bad_date, "unparseable date_received '" + *received + "'");
  }

  const std::string* sent = cell(field::date_sent);
  if (sent != nullptr && !sent->empty()) {
    if (auto date = parse_date(*sent)) {
      record.date_sent = *date;
    } else {
      return row_error(Errc::bad_date, "unparseable date_sent '" + *sent + "'");
    }
  }

  const std::string* timely = cell(field::timely_response);
  if (timely == nullptr || trim(*timely).empty()) {
    record.timely_response = Timely::missing;
  } else if (equals_normalized(*timely, "yes")) {
    record.timely_response = Timely::yes;
  } else if (equals_normalized(*timely, "no")) {
    record.timely_response = Timely::no;
  } else {
    return row_error(Errc::bad_category, "timely_response '" + *timely + "' is not Yes/No");
  }

  const std::string* response = cell(field::company_response);
  if (response != nullptr && !trim(*response).empty()) {
    if (auto category = parse_response_category(*response)) {
      record.company_response = *category;
    } else {
      return row_error(Errc::bad_category,
                       "company_response '" + *response + "' is not one of the 8 categories");
    }
  }

  return record;
}

std::vector<std::string> to_row(const ComplaintRecord& record, const SchemaSpec& schema) {
  std::vector<std::string> cells;
  for (const auto& canonical : canonical_fields()) {
    if (schema.column_map.find(canonical) == schema.column_map.end()) continue;
    if (canonical == field::complaint_id) {
      cells.push_back(record.complaint_id);
    } else if (canonical == field::company) {
      cells.push_back(record.company);
    } else if (canonical == field::product) {
      cells.push_back(record.product);
    } else if (canonical == field::issue) {
      cells.push_back(record.issue);
    } else if (canonical == field::state) {
      cells.push_back(record.state);
    } else if (canonical == field::date_received) {
      cells.push_back(format_date(record.date_received));
    } else if (canonical == field::date_sent) {
      cells.push_back(record.date_sent ? format_date(*record.date_sent) : "");
    } else if (canonical == field::timely_response) {
      cells.push_back(record.timely_response == Timely::yes  ? "Yes"
                      : record.timely_response == Timely::no ? "No"
                                                             : "");
    } else if (canonical == field::company_response) {
      cells.push_back(record.company_response ? to_string(*record.company_response) : "");
    } else if (canonical == field::narrative) {
      cells.push_back(record.narrative);
    }
  }
  return cells;
}

std::string csv_escape(const std::string& cell) {
  const bool needs_quotes = cell.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_escape(cells[i]);
  }
  out.push_back('\n');
  return out;
}

CsvReader::CsvReader(std::istream& in) : in_(in) {}

std::optional<std::vector<std::string>> CsvReader::next_row() {
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) {
    if (in_.bad()) raise(Errc::io, "read failure on CSV source");
    return std::nullopt;
  }
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool at_field_start = true;
  for (;;) {
    if (c == std::char_traits<char>::eof()) {
      if (in_.bad()) raise(Errc::io, "read failure on CSV source");
      row.push_back(std::move(cell));
      return row;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          cell.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_;
        cell.push_back(ch);
      }
    } else if (ch == '"' && at_field_start) {
      in_quotes = true;
      at_field_start = false;
    } else if (ch == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      at_field_start = true;
      c = in_.get();
      continue;
    } else if (ch == '\n') {
      ++line_;
      row.push_back(std::move(cell));
      return row;
    } else if (ch == '\r' && in_.peek() == '\n') {
      in_.get();
      ++line_;
      row.push_back(std::move(cell));
      return row;
    } else {
      cell.push_back(ch);
      at_field_start = false;
    }
    c = in_.get();
  }
}

RecordStream::RecordStream(std::istream& in, SchemaSpec schema)
    : in_(in), schema_(std::move(schema)) {
  schema_.validate();
  if (schema_.format == SourceFormat::json_lines) return;

  csv_.emplace(in_);
  auto header = csv_->next_row();
  if (!header) raise(Errc::header_mismatch, "CSV source is empty (no header row)");
  header_ = *header;

  const auto& fields = canonical_fields();
  column_of_field_.assign(fields.size(), -1);
  for (std::size_t f = 0; f < fields.size(); ++f) {
    auto mapped = schema_.column_map.find(fields[f]);
    if (mapped == schema_.column_map.end()) continue;
    auto it = std::find(header_.begin(), header_.end(), mapped->second);
    if (it == header_.end()) {
      if (is_required_field(fields[f])) {
        raise(Errc::header_mismatch, "declared column '" + mapped->second + "' absent from header");
      }
      continue;
    }
    column_of_field_[f] = static_cast<int>(it - header_.begin());
  }
}

std::optional<RowResult> RecordStream::finish(RowResult result) {
  if (std::holds_alternative<RowError>(result)) {
    RowError& error = std::get<RowError>(result);
    if (error.line == 0) error.line = line_;
    if (schema_.strict) {
      raise(error.code, error.message + " (line " + std::to_string(error.line) + ")");
    }
    ++errors_;
  } else {
    ++records_;
  }
  return result;
}

std::optional<RowResult> RecordStream::next() {
  return schema_.format == SourceFormat::csv ? next_csv() : next_json();
}

std::optional<RowResult> RecordStream::next_csv() {
  line_ = csv_->line() + 1;
  auto row = csv_->next_row();
  if (!row) return std::nullopt;
  if (row->size() != header_.size()) {
    return finish(RowError{line_, Errc::missing_field,
                           "row has " + std::to_string(row->size()) + " fields, header has " +
                               std::to_string(header_.size())});
  }
  // Project onto declared columns; extra source columns are ignored.
  std::map<std::string, std::string> raw;
  const auto& fields = canonical_fields();
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const int col = column_of_field_[f];
    if (col < 0) continue;
    raw[schema_.column_map.at(fields[f])] = (*row)[static_cast<std::size_t>(col)];
  }
  return finish(parse_record(raw, schema_));
}

std::optional<RowResult> RecordStream::next_json() {
  static const SchemaSpec identity = SchemaSpec::identity();
  std::string text;
  for (;;) {
    if (!std::getline(in_, text)) {
      if (in_.bad()) raise(Errc::io, "read failure on json-lines source");
      return std::nullopt;
    }
    ++line_;
    if (!trim(text).empty()) break;
  }
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return finish(RowError{line_, Errc::corrupt, "line is not a JSON object"});
  }
  std::map<std::string, std::string> raw;
  for (const auto& canonical : canonical_fields()) {
    auto it = doc.find(canonical);
    if (it == doc.end() || it->is_null()) continue;
    if (it->is_string()) {
      raw[canonical] = it->get<std::string>();
    } else {
      raw[canonical] = it->dump();
    }
  }
  SchemaSpec row_schema = identity;
  row_schema.strict = schema_.strict;
  return finish(parse_record(raw, row_schema));
}

void Summarizer::add(const ComplaintRecord& record) {
  ++partial_.row_count;

  auto categorical = [&](const char* name, const std::string& value) {
    if (value.empty()) {
      ++partial_.missing_counts[name];
    } else {
      distinct_[name].insert(value);
    }
  };
  categorical(field::company, record.company);
  categorical(field::product, record.product);
  categorical(field::issue, record.issue);
  categorical(field::state, record.state);
  if (record.narrative.empty()) ++partial_.missing_counts[field::narrative];
  if (!record.date_sent) ++partial_.missing_counts[field::date_sent];

  switch (record.timely_response) {
    case Timely::yes: ++partial_.timely_counts["Yes"]; break;
    case Timely::no: ++partial_.timely_counts["No"]; break;
    case Timely::missing:
      ++partial_.timely_missing;
      ++partial_.missing_counts[field::timely_response];
      break;
  }
  if (record.company_response) {
    ++partial_.response_counts[to_string(*record.company_response)];
  } else {
    ++partial_.response_missing;
    ++partial_.missing_counts[field::company_response];
  }

  if (!partial_.first_date_received || record.date_received < *partial_.first_date_received) {
    partial_.first_date_received = record.date_received;
  }
  if (!partial_.last_date_received || *partial_.last_date_received < record.date_received) {
    partial_.last_date_received = record.date_received;
  }
  if (record.date_sent && *record.date_sent < record.date_received) {
    ++partial_.date_order_violations;
  }
}

void Summarizer::add_error(const RowError&) { ++partial_.row_errors; }

void Summarizer::merge(const Summarizer& other) {
  partial_.row_count += other.partial_.row_count;
  partial_.row_errors += other.partial_.row_errors;
  for (const auto& [k, v] : other.partial_.missing_counts) partial_.missing_counts[k] += v;
  for (const auto& [k, v] : other.partial_.timely_counts) partial_.timely_counts[k] += v;
  for (const auto& [k, v] : other.partial_.response_counts) partial_.response_counts[k] += v;
  partial_.timely_missing += other.partial_.timely_missing;
  partial_.response_missing += other.partial_.response_missing;
  partial_.date_order_violations += other.partial_.date_order_violations;
  if (other.partial_.first_date_received &&
      (!partial_.first_date_received ||
       *other.partial_.first_date_received < *partial_.first_date_received)) {
    partial_.first_date_received = other.partial_.first_date_received;
  }
  if (other.partial_.last_date_received &&
      (!partial_.last_date_received ||
       *partial_.last_date_received < *other.partial_.last_date_received)) {
    partial_.last_date_received = other.partial_.last_date_received;
  }
  for (const auto& [name, values] : other.distinct_) {
    distinct_[name].insert(values.begin(), values.end());
  }
}

DatasetSummary Summarizer::summary() const {
  DatasetSummary out = partial_;
  for (const char* name : {field::company, field::product, field::issue, field::state}) {
    auto it = distinct_.find(name);
    out.cardinality[name] = it != distinct_.end() ? it->second.size() : 0;
  }
  return out;
}

DatasetSummary summarize(const std::vector<ComplaintRecord>& records) {
  Summarizer acc;
  for (const auto& record : records) acc.add(record);
  return acc.summary();
}

ReadResult read_all(std::istream& in, const SchemaSpec& schema) {
  RecordStream stream(in, schema);
  ReadResult out;
  Summarizer acc;
  while (auto row = stream.next()) {
    if (std::holds_alternative<ComplaintRecord>(*row)) {
      acc.add(std::get<ComplaintRecord>(*row));
      out.records.push_back(std::move(std::get<ComplaintRecord>(*row)));
    } else {
      acc.add_error(std::get<RowError>(*row));
      out.errors.push_back(std::move(std::get<RowError>(*row)));
    }
  }
  out.summary = acc.summary();
  return out;
}

ReadResult read_file(const std::filesystem::path& path, const SchemaSpec& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open " + path.string());
  return read_all(in, schema);
}

}  // namespace finsight::ingest
