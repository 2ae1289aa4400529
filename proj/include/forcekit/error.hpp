#pragma once

#include <stdexcept>
#include <string>

namespace forcekit {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes: ScenarioError -> 2, everything else -> 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input value (out-of-range symbol, point outside a domain, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// Operation undefined on a well-formed input (entropy of the zero matrix, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// An enumeration guard was exceeded.
class LimitError : public Error {
public:
    using Error::Error;
};

// A symbolic or geometric deduction could not be carried out.
class DeductionError : public Error {
public:
    using Error::Error;
};

// Scenario file failed to parse or validate.
class ScenarioError : public Error {
public:
    using Error::Error;
};

}  // namespace forcekit
