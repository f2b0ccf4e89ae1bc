#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ubm {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kNotHermitian,
  kNotUnitary,
  kEigenFailure,
  kInvalidGrid,
  kInsufficientData,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports. `key` names the offending config key or
// argument when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string key = {})
      : std::runtime_error(message), code_(code), key_(std::move(key)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& key() const noexcept { return key_; }

 private:
  ErrorCode code_;
  std::string key_;
};

}  // namespace ubm
