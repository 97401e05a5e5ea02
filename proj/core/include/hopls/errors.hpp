#pragma once

#include <stdexcept>
#include <string>

namespace hopls {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes, modes or ranks that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An iterative kernel hit its iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Input is numerically degenerate (zero matrix, zero response, non-finite data).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed tensor or model file.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace hopls
