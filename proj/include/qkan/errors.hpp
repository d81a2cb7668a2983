#pragma once

#include <stdexcept>
#include <string>

namespace qkan {

// Structural misuse: wrong sizes, out-of-range indices, malformed specs.
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Numeric argument outside its mathematical domain (e.g. |a| > 1).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Post-selection on an outcome with probability below 1e-14.
struct ZeroProbability : std::runtime_error {
    explicit ZeroProbability(const std::string& what) : std::runtime_error(what) {}
};

// Target function has a parity component incompatible with the requested degree.
struct ParityError : std::runtime_error {
    ParityError(const std::string& what, double discarded_sup)
        : std::runtime_error(what), discarded_sup_norm(discarded_sup) {}
    double discarded_sup_norm;
};

// Target function magnitude reaches 1 beyond the allowed margin.
struct CapError : std::runtime_error {
    explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qkan
