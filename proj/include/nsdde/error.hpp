#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsdde {

enum class ErrorCode {
    NonCommensurate,
    StepTooLarge,
    OutOfDomain,
    IndivisibleFactor,
    NoJumpPart,
    NotDeterministic,
    NonNestedSteps,
    ExplosionBudgetExceeded,
    DegenerateInput,
    OutOfRange,
    SchemaError,
    NestingError,
    UnknownModel,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. The code lets callers (and tests) branch on the
/// failure kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nsdde
