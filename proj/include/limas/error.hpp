#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace limas {

enum class ErrorCode {
    InvalidGraph,
    DimensionMismatch,
    NotALaplacian,
    NotCommuting,
    CyberGraphDisconnected,
    NotSimultaneouslyDiagonalizable,
    SingularControllability,
    SigmaTooSmall,
    NoConvergence,
    OrderTooLarge,
    BlockInversionFailure,
    SolverFailure,
    NonFiniteState,
    InvalidArgument,
    ConfigParse,
    UnknownParameter,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidGraph: return "InvalidGraph";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotALaplacian: return "NotALaplacian";
        case ErrorCode::NotCommuting: return "NotCommuting";
        case ErrorCode::CyberGraphDisconnected: return "CyberGraphDisconnected";
        case ErrorCode::NotSimultaneouslyDiagonalizable: return "NotSimultaneouslyDiagonalizable";
        case ErrorCode::SingularControllability: return "SingularControllability";
        case ErrorCode::SigmaTooSmall: return "SigmaTooSmall";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::OrderTooLarge: return "OrderTooLarge";
        case ErrorCode::BlockInversionFailure: return "BlockInversionFailure";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigParse: return "ConfigParse";
        case ErrorCode::UnknownParameter: return "UnknownParameter";
    }
    return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace limas
