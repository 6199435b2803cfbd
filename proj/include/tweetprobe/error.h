#ifndef TWEETPROBE_ERROR_H_
#define TWEETPROBE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tweetprobe {

enum class ErrorCode {
  kMalformedRecord,
  kDuplicateId,
  kInvalidConfig,
  kNoInstances,
  kInvalidRatios,
  kEmptyCorpus,
  kDimMismatch,
  kMalformed,
  kHeaderMismatch,
  kMissingTweetEmbedding,
  kDegenerateLabels,
  kNonFiniteLoss,
  kMissingSizeVariant,
  kIo,
  kUsage,
};

std::string_view error_code_name(ErrorCode code);

// Validation errors map to CLI exit code 1, everything else to 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tweetprobe

#endif  // TWEETPROBE_ERROR_H_
