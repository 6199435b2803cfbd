#include "tweetprobe/error.h"

namespace tweetprobe {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNoInstances: return "NoInstances";
    case ErrorCode::kInvalidRatios: return "InvalidRatios";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kMissingTweetEmbedding: return "MissingTweetEmbedding";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingSizeVariant: return "MissingSizeVariant";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kIo:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
      code_(code) {}

}  // namespace tweetprobe
