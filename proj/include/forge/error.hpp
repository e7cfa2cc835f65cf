#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Base of the toolkit's error hierarchy. ConfigError maps to CLI exit code 2,
// DataError (and subclasses) to exit code 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct IoFailure : DataError {
    using DataError::DataError;
};

struct MalformedPly : DataError {
    using DataError::DataError;
};

struct NonFiniteValue : DataError {
    using DataError::DataError;
};

struct UnsupportedShDegree : DataError {
    using DataError::DataError;
};

struct DimensionMismatch : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

struct ShapeMismatch : DataError {
    using DataError::DataError;
};

struct TooFewFrames : DataError {
    using DataError::DataError;
};

struct SegmentTooShort : DataError {
    using DataError::DataError;
};

struct TooShort : DataError {
    using DataError::DataError;
};

struct IndexOutOfRange : DataError {
    using DataError::DataError;
};

struct DegenerateGeometry : DataError {
    using DataError::DataError;
};

struct BudgetExceeded : DataError {
    using DataError::DataError;
};

struct EmptyLabelSet : DataError {
    using DataError::DataError;
};

} // namespace forge
