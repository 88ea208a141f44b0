#pragma once

#include <stdexcept>
#include <string>

namespace bonnetforge {

/// Invalid or inconsistent run configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem failure while reading inputs or writing outputs; exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bonnetforge
