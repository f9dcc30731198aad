#include "error.hpp"

namespace rankwitness {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::InvalidPath: return "InvalidPath";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ZeroConditioningEvent: return "ZeroConditioningEvent";
        case ErrorCode::NonBinaryAxis: return "NonBinaryAxis";
        case ErrorCode::InfeasibleMoments: return "InfeasibleMoments";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::ZeroMassComponent: return "ZeroMassComponent";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NoObservedData: return "NoObservedData";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace rankwitness
