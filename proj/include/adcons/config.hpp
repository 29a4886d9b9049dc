#pragma once

#include <stdexcept>
#include <string>

namespace adcons {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct QuadratureFailure : Error {
    using Error::Error;
};
struct BoundarySingularity : Error {
    using Error::Error;
};
struct DifferentiationDepthExceeded : Error {
    using Error::Error;
};
struct Overflow : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

// Numerical defaults shared by every module; echoed into reports.
struct Config {
    double eps_ml = 1e-12;
    double eps_abs = 1e-10;
    double eps_fail = 1e-8;
    double quad_tol = 1e-10;
    int ml_max_terms = 10000;
    double z_switch = 50.0;
    int jacobi_nodes = 64;
    int quad_max_depth = 24;
    int cm_order_cap = 16;
    int pw_order_cap = 512;
    int coeff_order_cap = 256;
};

inline const Config& default_config()
{
    static const Config c{};
    return c;
}

} // namespace adcons
