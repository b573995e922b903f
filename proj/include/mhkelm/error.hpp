#pragma once

#include <stdexcept>
#include <string>

namespace mhkelm {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Invalid hyperparameters or plans (a <= 0, C <= 0, L = 0, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input outside a function's mathematical domain (non-finite values).
class DomainError : public Error {
public:
    using Error::Error;
};

// Factorization failures and violated solve contracts.
class NumericError : public Error {
public:
    using Error::Error;
};

// Operation applied outside its contract (wrong family, empty report, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

// Malformed input files; message carries row/column location.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace mhkelm
