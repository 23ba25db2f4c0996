#include "finsight/error.hpp"

namespace finsight {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::bad_config: return "BadConfig";
    case Errc::bad_ratio: return "BadRatio";
    case Errc::bad_topic: return "BadTopic";
    case Errc::task_mismatch: return "TaskMismatch";
    case Errc::io: return "Io";
    case Errc::header_mismatch: return "HeaderMismatch";
    case Errc::missing_field: return "MissingField";
    case Errc::bad_date: return "BadDate";
    case Errc::bad_category: return "BadCategory";
    case Errc::corrupt: return "Corrupt";
    case Errc::version_unsupported: return "VersionUnsupported";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::empty_node: return "EmptyNode";
    case Errc::not_binary: return "NotBinary";
    case Errc::one_class_only: return "OneClassOnly";
    case Errc::width_mismatch: return "WidthMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::id_out_of_range: return "IdOutOfRange";
    case Errc::encoder_missing: return "EncoderMissing";
    case Errc::internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace finsight
