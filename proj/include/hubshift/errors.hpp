#pragma once

#include <stdexcept>
#include <string>

namespace hubshift {

// Invalid configuration or CLI usage. Mapped to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data. Mapped to exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hubshift
