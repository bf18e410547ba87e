#include "qam/errors.hpp"

namespace qam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroBasin: return "ZeroBasin";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotCptp: return "NotCptp";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidPovm: return "InvalidPovm";
    case ErrorCode::SingularFrame: return "SingularFrame";
    case ErrorCode::InvalidPatternSet: return "InvalidPatternSet";
    case ErrorCode::RateOutOfRange: return "RateOutOfRange";
    case ErrorCode::TooManyPatterns: return "TooManyPatterns";
    case ErrorCode::NonHermitianH: return "NonHermitianH";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::NoGapFound: return "NoGapFound";
    case ErrorCode::NotAProjector: return "NotAProjector";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::DuplicatePatterns: return "DuplicatePatterns";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotSpinVector: return "NotSpinVector";
    case ErrorCode::InconsistentLayout: return "InconsistentLayout";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace qam
