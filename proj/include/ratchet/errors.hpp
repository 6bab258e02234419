#ifndef RATCHET_ERRORS_HPP
#define RATCHET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ratchet {

// Invalid user-supplied parameters (CLI maps these to exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested computation lies outside the running-cycle regime, e.g. a field
// below the slope bounds (exit code 3).
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time stepping failed: non-finite state, step budget exhausted, singular
// flow (exit code 4).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An internal numerical consistency check failed (exit code 4).
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ratchet

#endif
