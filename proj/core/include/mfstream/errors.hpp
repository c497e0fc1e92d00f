#pragma once

#include <stdexcept>
#include <string>

namespace mfstream {

/// Invalid or inconsistent input: malformed files, violated preconditions,
/// out-of-range parameters. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during analysis, e.g. a degenerate zero-variance
/// segment combined with a negative moment order. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfstream
