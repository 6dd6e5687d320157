#pragma once

#include <stdexcept>
#include <string>

namespace rnr {

// Malformed or inconsistent input data (bad files, broken invariants).
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during optimization or inference (non-finite loss,
// divergence). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rnr
