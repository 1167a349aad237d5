#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasync {

enum class ErrorCode {
    InvalidArgument,
    NonFinite,
    RepeatedEigenvalue,
    InvalidPairing,
    DegeneratePair,
    RealnessViolation,
    SlotMismatch,
    SingularStateMap,
    NotRegular,
    Incompatible,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::RepeatedEigenvalue: return "RepeatedEigenvalue";
        case ErrorCode::InvalidPairing: return "InvalidPairing";
        case ErrorCode::DegeneratePair: return "DegeneratePair";
        case ErrorCode::RealnessViolation: return "RealnessViolation";
        case ErrorCode::SlotMismatch: return "SlotMismatch";
        case ErrorCode::SingularStateMap: return "SingularStateMap";
        case ErrorCode::NotRegular: return "NotRegular";
        case ErrorCode::Incompatible: return "Incompatible";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can print it as a single machine-parsable line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace phasync
