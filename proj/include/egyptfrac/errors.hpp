#pragma once

#include <stdexcept>
#include <string>

namespace egyptfrac {

/// Input outside an operation's mathematical domain (x <= 0, a = 0, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Iterative solver or quadrature did not converge.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Request exceeds a configured cap (subset enumeration size, modulus size).
struct refusal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scaled integer sums do not fit the selected integer width.
struct overflow_error : std::overflow_error {
    using std::overflow_error::overflow_error;
};

/// Parameters that cannot produce a usable construction (reservoir too small, ...).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Randomized search ran out of its retry budget.
struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed command line or textual input.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace egyptfrac
