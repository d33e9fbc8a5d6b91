#pragma once

#include <stdexcept>
#include <string>

namespace glean {

// Coarse failure category; the CLI maps these onto process exit codes.
enum class ErrorKind {
    input,     // unreadable or malformed input files
    data,      // well-formed input that is invalid for the requested operation
    remote,    // transport or protocol failure talking to a remote service
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error input_error(const std::string& what) { return {ErrorKind::input, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::data, what}; }
inline Error remote_error(const std::string& what) { return {ErrorKind::remote, what}; }

}  // namespace glean
