#pragma once

#include <ostream>
#include <stdexcept>
#include <string>

namespace fakeflow {

/// Base of every error the library throws. `kind()` is the short class name
/// recorded in manifests and printed by the CLI.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

class InvalidInput : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "InvalidInput"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "InvalidArgument"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "IoError"; }
};

class FormatError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "FormatError"; }
};

class TruncationError : public FormatError {
public:
    using FormatError::FormatError;
    const char* kind() const noexcept override { return "TruncationError"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ConfigError"; }
};

class PipelineError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "PipelineError"; }
};

/// Destination of library warnings (degenerate inputs, unmatched files).
/// Defaults to std::clog; pass nullptr to silence.
void set_warning_stream(std::ostream* os);
void warn(const std::string& message);

}  // namespace fakeflow
