#pragma once

#include <stdexcept>
#include <string>

namespace rislink {

/// Input outside the domain of a model or formula (negative K, zero distance,
/// out-of-band carrier, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) {
        throw DomainError(what);
    }
}

inline void require_positive(double value, const char* name) {
    if (!(value > 0.0)) {
        throw DomainError(std::string(name) + " must be positive, got " + std::to_string(value));
    }
}

} // namespace detail
} // namespace rislink
