#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qam {

enum class ErrorCode {
  ZeroBasin,
  DimensionOverflow,
  UnknownBlock,
  LengthMismatch,
  DimMismatch,
  NotCptp,
  InvalidState,
  InvalidPovm,
  SingularFrame,
  InvalidPatternSet,
  RateOutOfRange,
  TooManyPatterns,
  NonHermitianH,
  EigensolverFailure,
  NoGapFound,
  NotAProjector,
  StepTooLarge,
  DuplicatePatterns,
  TruncationTooSmall,
  GridTooCoarse,
  NotSpinVector,
  InconsistentLayout,
  BadProbability,
  ConfigParse,
  UnknownExperiment,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace qam
