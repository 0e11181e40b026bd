#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace raf {

enum class ErrorCode {
    InvalidArgument,
    EmptyInput,
    NonFiniteInput,
    WindowTooLong,
    EmptyDataset,
    NoValidWindows,
    EmptyIndex,
    DimensionMismatch,
    ShortSample,
    NoTokens,
    ZeroNormQuery,
    LengthMismatch,
    ZeroTruth,
    AllZeroActuals,
    DegenerateScale,
    ZeroBaseline,
    NonPositiveEntry,
    AdapterUnavailable,
    AdapterError,
    MalformedResponse,
    ShapeMismatch,
    CapabilityMissing,
    ParseError,
    DuplicateId,
    EmptySeries,
    MissingBaselineCell,
    ForecasterFailed,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Input/configuration problems map to CLI exit code 1, everything else to 2.
    bool is_validation() const noexcept;

private:
    ErrorCode code_;
};

} // namespace raf
