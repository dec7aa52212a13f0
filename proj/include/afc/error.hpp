#pragma once

#include <stdexcept>
#include <string>

namespace afc {

/// Raised when an operation's precondition or a data invariant is violated.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed or incomplete configuration input.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace afc
