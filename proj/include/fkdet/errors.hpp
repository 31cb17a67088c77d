#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fkdet {

enum class ErrorCode {
    DescriptorMismatch,
    Capacity,
    Parameter,
    InsufficientData,
    ChainTooShort,
    Precondition,
    Data,
    Window,
    Parse,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// drivers can map it to a diagnostic or an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fkdet
