#pragma once

#include <stdexcept>
#include <string>

namespace fpkit {

// Thrown for bad user input (CLI arguments, config values, malformed
// manifests). The CLI maps this to exit code 2; everything else derived
// from std::runtime_error maps to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fpkit
