#pragma once

#include <stdexcept>
#include <string>

namespace finsight {

// Error codes shared by exceptions and by per-row errors from lenient
// streaming. Names follow the contract vocabulary used throughout the docs.
enum class Errc {
  bad_config,
  bad_ratio,
  bad_topic,
  task_mismatch,
  io,
  header_mismatch,
  missing_field,
  bad_date,
  bad_category,
  corrupt,
  version_unsupported,
  empty_dataset,
  empty_corpus,
  empty_node,
  not_binary,
  one_class_only,
  width_mismatch,
  length_mismatch,
  id_out_of_range,
  encoder_missing,
  internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const { return code_; }

  // The message without the code-name prefix, for rethrowing with context.
  const std::string& detail() const { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace finsight
