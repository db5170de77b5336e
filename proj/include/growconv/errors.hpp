#ifndef GROWCONV_ERRORS_HPP
#define GROWCONV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace growconv {

// Usage / configuration problems (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or malformed input data (CLI exit code 2).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatches between tensors, kernels and layers.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite ones are required (CLI exit code 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A constant patch has no contrast to normalize against; callers skip it.
struct NoContrastError : std::runtime_error {
    NoContrastError() : std::runtime_error("patch is constant, cannot scale to unit response") {}
};

}  // namespace growconv

#endif
