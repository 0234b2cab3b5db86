#pragma once

#include <stdexcept>
#include <string>

namespace cdl {

/// Requested instance exceeds the sizes this library computes exactly
/// (dense dimensions, enumeration ranges).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A matrix that must be inverted is numerically singular
/// (e.g. a Gram matrix with n < t-1).
struct conditioning_error : std::runtime_error {
    explicit conditioning_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cdl
