#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace ictrace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad sizes, out-of-range indices, violated preconditions. CLI exit code 2.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input files. CLI exit code 3.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Solver non-convergence, unreachable simulation targets. CLI exit code 4.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Fixed 17-significant-digit rendering so repeated runs emit identical bytes.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// FNV-1a 64-bit, used for output manifests and graph identifiers.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace ictrace
