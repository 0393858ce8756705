#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modea {

enum class ErrorCode {
    MalformedRow,
    NonPositiveInput,
    InvalidOutput,
    DuplicateId,
    MissingInputCount,
    TooFewRows,
    BadProportions,
    DimensionMismatch,
    IndexOutOfRange,
    ThetaOutOfRange,
    SolverFailure,
    KOutOfRange,
    TooFewRecords,
    TooManyTerms,
    SingularSystem,
    EmptyTrainingFold,
    EmptyCluster,
    ClusterTooSmall,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Error raised while running a pipeline stage; carries the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause);

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace modea
