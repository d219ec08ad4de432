#pragma once

#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tflab
{
    using Real = double;
    using Complex = std::complex<Real>;

    using RVector = Eigen::VectorXd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using CMatrix = Eigen::MatrixXcd;
    using IVector = Eigen::VectorXi;

    inline constexpr Real kPi = std::numbers::pi_v<Real>;
    inline constexpr Real kTwoPi = 2 * std::numbers::pi_v<Real>;
    inline constexpr Complex kI{0.0, 1.0};

    inline const char* version() noexcept { return "0.4.0"; }

    /// Base of every error raised by the library.
    struct Error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    /// Invalid numeric parameter (nonpositive step, p outside [1,inf], ...).
    struct ParameterError : Error
    {
        using Error::Error;
    };

    /// Incompatible grids or index sets.
    struct ShapeError : Error
    {
        using Error::Error;
    };

    /// Value outside the domain of an operation (nonpositive weight, ...).
    struct DomainError : Error
    {
        using Error::Error;
    };

    /// Iterative method failed to reach its tolerance.
    struct ConvergenceError : Error
    {
        using Error::Error;
    };

    /// Not enough usable data for a fit or estimate.
    struct InsufficientDataError : Error
    {
        using Error::Error;
    };

    /// Two routes that must agree did not (reassembly, sign conventions).
    struct ConsistencyError : Error
    {
        using Error::Error;
    };

    /// Truncated Gabor system is numerically not a frame.
    struct NotAFrameError : Error
    {
        using Error::Error;
    };

    /// Lattice map failed the admissibility test at the current truncation.
    struct NotAdmissibleError : Error
    {
        using Error::Error;
    };

    /// Requested path is not available for the given input (e.g. non-quadratic phase).
    struct UnsupportedError : Error
    {
        using Error::Error;
    };

    /// File could not be read or written, or has the wrong format.
    struct IoError : Error
    {
        using Error::Error;
    };

    /// Lp-type exponent; `inf` encodes p = infinity.
    inline constexpr Real inf = std::numeric_limits<Real>::infinity();
}  // namespace tflab
