#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace daebvp
{

enum class ErrorCode
{
    InvalidInput,
    DimensionMismatch,
    NotRegular,
    ZeroEMatrix,
    SingularTransform,
    DecompositionFailed,
    IncompatibleBoundaryStructure,
    SingularShootingMatrix,
    InconsistentInitialValue,
    Overflow,
    OracleSingular,
    SizeLimitExceeded
};

const char *to_string(ErrorCode code) noexcept;

/*
 * Every failure raised by the library. `value()` carries the quantity that
 * tripped the check (a condition estimate, a residual, a norm), or NaN when
 * there is none.
 */
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &message, double value = std::numeric_limits<double>::quiet_NaN());

    ErrorCode code() const noexcept { return code_; }
    double value() const noexcept { return value_; }

private:
    ErrorCode code_;
    double value_;
};

} // namespace daebvp
