#pragma once

#include <stdexcept>
#include <string>

namespace mrunet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Tensor shapes do not satisfy an operation's precondition.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A node does not belong to the tape it is used with.
class GraphError : public Error {
public:
    using Error::Error;
};

/// Two forward evaluations at the same point disagreed during a gradient check.
class UnreliableCheckError : public Error {
public:
    using Error::Error;
};

/// Paired differences have zero spread, so the t statistic is undefined.
class DegenerateVarianceError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file content (bad magic, unsupported encoding, truncation).
class FormatError : public IoError {
public:
    using IoError::IoError;
};

/// A checkpoint does not match the architecture it is loaded into.
class CompatibilityError : public IoError {
public:
    using IoError::IoError;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace mrunet
