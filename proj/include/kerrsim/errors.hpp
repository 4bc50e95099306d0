#pragma once

#include <stdexcept>
#include <string>

namespace kerrsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct TruncationTooSmall : Error {
    using Error::Error;
};

struct NonFiniteAmplitude : Error {
    using Error::Error;
};

struct ThetaNearSingular : Error {
    using Error::Error;
};

// Thrown by solve_theta_for_gamma when the requested |gamma| exceeds what the
// squeezing level supports; carries the best achievable magnitude.
struct NoSolution : Error {
    double gamma_max;
    NoSolution(const std::string& msg, double gmax) : Error(msg), gamma_max(gmax) {}
};

struct QuadratureNotConverged : Error {
    using Error::Error;
};

struct NonPositiveFI : Error {
    using Error::Error;
};

struct HPViolation : Error {
    double leaked;
    HPViolation(const std::string& msg, double leaked_) : Error(msg), leaked(leaked_) {}
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace kerrsim
