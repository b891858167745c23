#pragma once

#include <stdexcept>
#include <string>

namespace kerrpair {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on the inputs does not hold (bad parameter, out-of-range index,
// invalid domain). The CLI reports these as configuration errors.
class DomainError : public Error {
public:
    using Error::Error;
};

// A closed-form expression was evaluated at one of its poles.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Malformed or inconsistent run configuration / JSON.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numerical procedure failed: non-convergence, ambiguous state identification,
// branch-tracking failure, unexpected root count, period detection failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace kerrpair
