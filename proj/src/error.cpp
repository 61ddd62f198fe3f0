#include "daebvp/error.hpp"

namespace daebvp
{

const char *to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::ZeroEMatrix: return "ZeroEMatrix";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::DecompositionFailed: return "DecompositionFailed";
    case ErrorCode::IncompatibleBoundaryStructure: return "IncompatibleBoundaryStructure";
    case ErrorCode::SingularShootingMatrix: return "SingularShootingMatrix";
    case ErrorCode::InconsistentInitialValue: return "InconsistentInitialValue";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OracleSingular: return "OracleSingular";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message, double value)
    : std::runtime_error(message), code_(code), value_(value)
{
}

} // namespace daebvp
