#include "upconv/error.hpp"

namespace upconv {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::shape: return "shape_error";
    case ErrorCode::numerical: return "numerical_error";
    case ErrorCode::precision: return "precision_error";
    case ErrorCode::undefined_statistic: return "undefined_statistic";
    case ErrorCode::calibration: return "calibration_error";
    case ErrorCode::config: return "config_error";
    case ErrorCode::resolution: return "resolution_error";
    case ErrorCode::invalid_rate: return "invalid_rate";
    case ErrorCode::format: return "format_error";
    case ErrorCode::undefined_normalization: return "undefined_normalization";
    case ErrorCode::io: return "io_error";
  }
  return "unknown_error";
}

}  // namespace upconv
