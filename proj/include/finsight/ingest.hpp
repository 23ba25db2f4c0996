#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "finsight/date.hpp"
#include "finsight/error.hpp"

namespace finsight::ingest {

// Canonical field names. Sources map their own headers onto these; everything
// downstream speaks only this vocabulary.
namespace field {
inline constexpr const char* complaint_id = "complaint_id";
inline constexpr const char* company = "company";
inline constexpr const char* product = "product";
inline constexpr const char* issue = "issue";
inline constexpr const char* state = "state";
inline constexpr const char* date_received = "date_received";
inline constexpr const char* date_sent = "date_sent";
inline constexpr const char* narrative = "narrative";
inline constexpr const char* timely_response = "timely_response";
inline constexpr const char* company_response = "company_response";
}  // namespace field

// Canonical field order for serialization; required fields first.
const std::vector<std::string>& canonical_fields();
bool is_required_field(const std::string& canonical);

enum class SourceFormat { csv, json_lines };

struct SchemaSpec {
  std::map<std::string, std::string> column_map;  // canonical -> source header
  SourceFormat format = SourceFormat::csv;
  bool strict = false;

  // Required coverage and source-column uniqueness; throws HeaderMismatch.
  void validate() const;

  // Source headers in canonical field order (only mapped fields).
  std::vector<std::string> source_header_order() const;

  // The stock mapping for the CFPB public export headers.
  static SchemaSpec cfpb_default();

  // Identity mapping (canonical names as source keys), used for json-lines.
  static SchemaSpec identity();

  // JSON document of {canonical field: source header}; format/strict keep
  // their defaults and are set by the caller.
  static SchemaSpec load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

enum class Timely { yes, no, missing };

// The 8 resolution outcomes, in canonical id order (0-7).
enum class ResponseCategory {
  closed_with_explanation = 0,
  closed_with_non_monetary_relief = 1,
  in_progress = 2,
  closed_with_monetary_relief = 3,
  closed_without_relief = 4,
  closed = 5,
  untimely_response = 6,
  closed_with_relief = 7,
};

inline constexpr int kResponseCategoryCount = 8;

const std::vector<std::string>& response_category_names();
const std::string& to_string(ResponseCategory category);

// Case-insensitive after whitespace trimming; nullopt for no match.
std::optional<ResponseCategory> parse_response_category(const std::string& text);

struct ComplaintRecord {
  std::string complaint_id;
  std::string company;  // empty string = missing categorical
  std::string product;
  std::string issue;
  std::string state;
  Date date_received{};
  std::optional<Date> date_sent;
  std::string narrative;
  Timely timely_response = Timely::missing;
  std::optional<ResponseCategory> company_response;

  bool operator==(const ComplaintRecord&) const = default;
};

struct RowError {
  std::size_t line = 0;  // 1-based line in the source (0 when unknown)
  Errc code = Errc::internal;
  std::string message;
};

using RowResult = std::variant<ComplaintRecord, RowError>;

// One raw source row (source column -> text) to a canonical record. Empty
// values become missing; dates are ISO YYYY-MM-DD; enum text is normalized.
RowResult parse_record(const std::map<std::string, std::string>& raw_row,
                       const SchemaSpec& schema);

// Inverse of parse_record for CSV export: one cell per mapped source column,
// in source_header_order().
std::vector<std::string> to_row(const ComplaintRecord& record, const SchemaSpec& schema);

// RFC-4180 writer helpers.
std::string csv_escape(const std::string& cell);
std::string csv_line(const std::vector<std::string>& cells);

// Streaming RFC-4180 reader; one row in memory at a time. Handles quoted
// fields with embedded separators, doubled quotes, and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in);
  // nullopt at end of input.
  std::optional<std::vector<std::string>> next_row();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

// Pull-based record stream over CSV or json-lines. The CSV header is read and
// validated on construction (HeaderMismatch when a declared column is absent).
// In strict mode the first malformed row throws; in lenient mode row errors
// are yielded in-stream.
class RecordStream {
 public:
  RecordStream(std::istream& in, SchemaSpec schema);

  std::optional<RowResult> next();

  std::size_t records_yielded() const { return records_; }
  std::size_t errors_yielded() const { return errors_; }

 private:
  std::optional<RowResult> next_csv();
  std::optional<RowResult> next_json();
  std::optional<RowResult> finish(RowResult result);

  std::istream& in_;
  SchemaSpec schema_;
  std::optional<CsvReader> csv_;
  std::vector<std::string> header_;
  std::vector<int> column_of_field_;  // per canonical_fields() index, -1 if unmapped
  std::size_t line_ = 0;
  std::size_t records_ = 0;
  std::size_t errors_ = 0;
};

struct DatasetSummary {
  std::size_t row_count = 0;
  std::size_t row_errors = 0;
  std::map<std::string, std::size_t> missing_counts;  // canonical field -> rows missing it
  std::map<std::string, std::size_t> cardinality;     // categorical field -> distinct values
  std::map<std::string, std::size_t> timely_counts;   // "Yes"/"No"
  std::size_t timely_missing = 0;
  std::map<std::string, std::size_t> response_counts;  // category name -> rows
  std::size_t response_missing = 0;
  std::optional<Date> first_date_received;
  std::optional<Date> last_date_received;
  std::size_t date_order_violations = 0;  // date_sent < date_received (kept, flagged)
};

// Single-pass accumulator; mergeable so partial summaries add up.
class Summarizer {
 public:
  void add(const ComplaintRecord& record);
  void add_error(const RowError& error);
  void merge(const Summarizer& other);
  DatasetSummary summary() const;

 private:
  DatasetSummary partial_;
  std::map<std::string, std::set<std::string>> distinct_;
};

DatasetSummary summarize(const std::vector<ComplaintRecord>& records);

struct ReadResult {
  std::vector<ComplaintRecord> records;
  std::vector<RowError> errors;
  DatasetSummary summary;
};

ReadResult read_all(std::istream& in, const SchemaSpec& schema);
ReadResult read_file(const std::filesystem::path& path, const SchemaSpec& schema);

}  // namespace finsight::ingest
