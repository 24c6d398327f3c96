#pragma once

#include <stdexcept>
#include <string>

namespace alaw {

// Bad input data or an out-of-range request.  Maps to CLI exit code 2,
// together with std::domain_error and command-line usage errors.
class PreconditionError : public std::domain_error {
public:
    explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

// Numerical validation failure on data that should have been well formed
// (trace drift, lost hermiticity, RNG state corruption...).  CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// The library caught itself producing inconsistent results (an assembled
// bound exceeding its closed form, a non-converging series).  CLI exit code 3.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace alaw
