#pragma once

#include <stdexcept>
#include <string>

namespace paddle {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied configuration or task violates a precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A domain object violates one of its invariants (e.g. a class without support).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Malformed feature-bank or results file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Projected gradient descent blew up.
class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace paddle
