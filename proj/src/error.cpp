#include "raf/error.hpp"

namespace raf {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NoValidWindows: return "NoValidWindows";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShortSample: return "ShortSample";
    case ErrorCode::NoTokens: return "NoTokens";
    case ErrorCode::ZeroNormQuery: return "ZeroNormQuery";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::AllZeroActuals: return "AllZeroActuals";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::AdapterUnavailable: return "AdapterUnavailable";
    case ErrorCode::AdapterError: return "AdapterError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CapabilityMissing: return "CapabilityMissing";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::MissingBaselineCell: return "MissingBaselineCell";
    case ErrorCode::ForecasterFailed: return "ForecasterFailed";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool Error::is_validation() const noexcept
{
    switch (code_) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyInput:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::WindowTooLong:
    case ErrorCode::EmptyDataset:
    case ErrorCode::LengthMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateId:
    case ErrorCode::EmptySeries:
    case ErrorCode::IoError:
        return true;
    default:
        return false;
    }
}

} // namespace raf
