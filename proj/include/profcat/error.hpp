#pragma once

#include <stdexcept>
#include <string>

namespace profcat {

// Base of every error thrown by the library. The CLI maps each subclass to
// an exit code (see README).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file or text.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a cross-reference or graph invariant.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Unreadable, corrupted or version-mismatched model file.
class ModelError : public Error {
public:
    using Error::Error;
};

// Training produced no usable output, or a training precondition failed.
class TrainError : public Error {
public:
    using Error::Error;
};

// External featurizer could not run or exited with a failure status.
class ExternalError : public Error {
public:
    using Error::Error;
};

// Bad configuration value or missing required setting.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Lookup of an identifier (descriptor code, doc id, session) that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace profcat
