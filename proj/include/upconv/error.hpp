#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace upconv {

enum class ErrorCode {
  invalid_dimension,
  shape,
  numerical,
  precision,
  undefined_statistic,
  calibration,
  config,
  resolution,
  invalid_rate,
  format,
  undefined_normalization,
  io,
};

// Stable machine-readable name, used by the CLI diagnostics.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace upconv
