#include "fkdet/errors.hpp"

namespace fkdet {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DescriptorMismatch: return "descriptor-mismatch";
        case ErrorCode::Capacity: return "capacity";
        case ErrorCode::Parameter: return "parameter";
        case ErrorCode::InsufficientData: return "insufficient-data";
        case ErrorCode::ChainTooShort: return "chain-too-short";
        case ErrorCode::Precondition: return "precondition";
        case ErrorCode::Data: return "data";
        case ErrorCode::Window: return "window";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message), code_(code) {}

}  // namespace fkdet
