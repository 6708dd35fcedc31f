#pragma once

#include <stdexcept>
#include <string>

namespace landscape {

// Error taxonomy shared by the library and the CLI. The CLI maps these onto
// process exit codes: IoError -> 1, PreconditionError (and subclasses) -> 2,
// SearchError -> 3.

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct NoSuchSegmentError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct ConstantSegmentError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct EmptyDomainError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct TargetDegenerateError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct ScaleTooLargeError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct ConfigError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct SearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace landscape
