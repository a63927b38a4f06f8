#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weave {

enum class ErrorCode {
    DimensionMismatch,
    ZeroNormVector,
    InvalidConfig,
    InvalidSpec,
    InvalidDistribution,
    UnknownTrackId,
    InconsistentCounts,
    ZeroDetected,
    EmptyInput,
    QueryIdentityAbsentFromGallery,
    IndexOutOfRange,
    TooLargeForEnumeration,
    ParseError,
    IoError,
};

std::string_view error_code_name(ErrorCode code);

/// Library-wide exception carrying a machine-checkable code plus a message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroNormVector: return "ZeroNormVector";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::UnknownTrackId: return "UnknownTrackId";
        case ErrorCode::InconsistentCounts: return "InconsistentCounts";
        case ErrorCode::ZeroDetected: return "ZeroDetected";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::QueryIdentityAbsentFromGallery: return "QueryIdentityAbsentFromGallery";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::TooLargeForEnumeration: return "TooLargeForEnumeration";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace weave
