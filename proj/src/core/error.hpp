#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankwitness {

enum class ErrorCode {
    InvalidArgument,
    CycleDetected,
    UnknownVariable,
    DuplicateName,
    InvalidPath,
    NegativeEntry,
    NotNormalized,
    ShapeMismatch,
    ZeroConditioningEvent,
    NonBinaryAxis,
    InfeasibleMoments,
    TooLarge,
    ZeroMassComponent,
    OutOfRange,
    NoObservedData,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the core carries one of the codes above so the C
/// layer can map it onto a status value without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rankwitness
