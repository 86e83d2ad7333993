#pragma once

#include <stdexcept>
#include <string>

namespace sdal {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incompatible matrix/vector dimensions between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An index referenced an element outside its container.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Input is structurally valid but numerically degenerate (e.g. all-zero data).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Not enough data points to perform the requested operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// The candidate set is empty; active learning cannot select a new sample.
class CandidatesExhaustedError : public Error {
public:
    using Error::Error;
};

/// A state-update request contradicts the current container state.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside its admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A physical or model parameter is invalid (e.g. non-positive viscosity).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A linear system is exactly singular (e.g. duplicate interpolation points).
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Snapshot ingestion failed (inconsistent grids or spatial dimensions).
class IngestionError : public Error {
public:
    using Error::Error;
};

/// The ROM error estimator cannot be evaluated.
class EstimatorError : public Error {
public:
    using Error::Error;
};

/// File input/output failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Run-configuration schema violation; carries key/line diagnostics in the message.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A full-order-model query failed; message carries iteration context.
class FomError : public Error {
public:
    using Error::Error;
};

} // namespace sdal
