#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace detkdpp {

enum class ErrorCode {
  EmptyData,
  InvalidBandwidth,
  NegativeHistogram,
  InvalidInput,
  ConvergenceFailure,
  RankTooLarge,
  SingularKernel,
  NumericalBreakdown,
  SingularBlock,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::InvalidBandwidth: return "InvalidBandwidth";
    case ErrorCode::NegativeHistogram: return "NegativeHistogram";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// All library failures are reported through this type; code() identifies the
// condition, what() carries "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace detkdpp
