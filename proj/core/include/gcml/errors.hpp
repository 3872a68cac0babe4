#pragma once

#include <stdexcept>
#include <string>

namespace gcml {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad CSV, invalid configuration values, broken invariants.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure during estimation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Outcome vector is constant (or a class is empty) so the fit is undefined.
class DegenerateOutcome : public NumericError {
public:
    using NumericError::NumericError;
};

/// A marginal proportion collapsed to 0 or 1, so the odds ratio is undefined.
class DegenerateMarginal : public NumericError {
public:
    using NumericError::NumericError;
};

/// Too many bootstrap replicates failed for the interval to be trusted.
class InferenceUnstable : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace gcml
