#include "modea/error.hpp"

namespace modea {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::InvalidOutput: return "InvalidOutput";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingInputCount: return "MissingInputCount";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::BadProportions: return "BadProportions";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::TooFewRecords: return "TooFewRecords";
    case ErrorCode::TooManyTerms: return "TooManyTerms";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyTrainingFold: return "EmptyTrainingFold";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::ClusterTooSmall: return "ClusterTooSmall";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}

}  // namespace modea
