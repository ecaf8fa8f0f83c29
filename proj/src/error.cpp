#include "sparsespace/error.hpp"

namespace sparsespace {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::DuplicateEntry: return "DuplicateEntry";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::MalformedEntry: return "MalformedEntry";
        case ErrorCode::UnsupportedKind: return "UnsupportedKind";
        case ErrorCode::IndexOutOfDeclaredBounds: return "IndexOutOfDeclaredBounds";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::ZeroMachines: return "ZeroMachines";
        case ErrorCode::StructureExhausted: return "StructureExhausted";
        case ErrorCode::InconsistentBlockCount: return "InconsistentBlockCount";
        case ErrorCode::TargetMismatch: return "TargetMismatch";
        case ErrorCode::LevelBudgetExceeded: return "LevelBudgetExceeded";
        case ErrorCode::CapacityExceeded: return "CapacityExceeded";
        case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
        case ErrorCode::PropertyViolated: return "PropertyViolated";
        case ErrorCode::UnknownDesign: return "UnknownDesign";
        case ErrorCode::BadParameters: return "BadParameters";
        case ErrorCode::BadGraph: return "BadGraph";
        case ErrorCode::Deadlock: return "Deadlock";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::IntegrityError: return "IntegrityError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace sparsespace
