#pragma once

#include <stdexcept>
#include <string>

namespace smpr {

/// Bad user input: unknown family, parameter out of range, malformed file.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: Cholesky breakdown, Newton divergence, truncation abort.
/// `detail` carries the quantity that triggered the failure (failing order,
/// achievable bound, clipped mass, ...) so callers can report it.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double detail = 0.0)
        : std::runtime_error(what), detail_(detail) {}

    double detail() const noexcept { return detail_; }

private:
    double detail_;
};

}  // namespace smpr
