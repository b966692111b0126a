#pragma once

#include <stdexcept>
#include <string>

namespace ssvs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed term formula or unknown variable.
class TermError : public Error {
public:
    using Error::Error;
};

/// Bad tabular input: unreadable CSV, blank cells, undeclared levels.
class DataError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid prior specification or evaluation misuse.
class PriorError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside a Gibbs draw.
class SamplerError : public Error {
public:
    using Error::Error;
};

/// Run configuration could not be resolved.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ssvs
