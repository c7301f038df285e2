#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ehc {

/// Base for all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke an operation's precondition (duplicate id, dimension mismatch).
class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Malformed store or corpus file. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Completion/embedding backend failure (transport, non-2xx status).
class BackendError : public Error {
public:
    explicit BackendError(const std::string& what, int status = 0)
        : Error(what), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Backend answered with a body of the wrong shape.
class ProtocolError : public BackendError {
public:
    using BackendError::BackendError;
};

}  // namespace ehc
