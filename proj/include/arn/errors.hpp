#ifndef ARN_ERRORS_HPP
#define ARN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace arn {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid numeric parameter (non-positive k/rho/p, threshold out of range, ...).
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

// Threshold at or above the peak, or coverage unbounded on one side.
class CoverageError : public Error {
public:
    explicit CoverageError(const std::string& msg) : Error(msg) {}
};

// Arity mismatch, duplicate node centers, empty candidate lists.
class StructureError : public Error {
public:
    explicit StructureError(const std::string& msg) : Error(msg) {}
};

// Malformed or truncated input files.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Filesystem level failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Operation requires a state the object is not in (e.g. untrained network).
class StateError : public Error {
public:
    explicit StateError(const std::string& msg) : Error(msg) {}
};

// Model file carries an unsupported format version.
class VersionError : public Error {
public:
    explicit VersionError(const std::string& msg) : Error(msg) {}
};

// Stored content hash does not match the recomputed one.
class HashError : public Error {
public:
    explicit HashError(const std::string& msg) : Error(msg) {}
};

}  // namespace arn

#endif
