#include "nsdde/error.hpp"

namespace nsdde {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonCommensurate: return "NonCommensurate";
        case ErrorCode::StepTooLarge: return "StepTooLarge";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::IndivisibleFactor: return "IndivisibleFactor";
        case ErrorCode::NoJumpPart: return "NoJumpPart";
        case ErrorCode::NotDeterministic: return "NotDeterministic";
        case ErrorCode::NonNestedSteps: return "NonNestedSteps";
        case ErrorCode::ExplosionBudgetExceeded: return "ExplosionBudgetExceeded";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::NestingError: return "NestingError";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace nsdde
