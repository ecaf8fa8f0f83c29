#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsespace {

enum class ErrorCode {
    InvalidArgument,
    OutOfBounds,
    DuplicateEntry,
    DimensionMismatch,
    // Matrix Market ingestion
    MalformedHeader,
    MalformedEntry,
    UnsupportedKind,
    IndexOutOfDeclaredBounds,
    // Transformation chain
    InvalidSpec,
    ZeroMachines,
    // Streaming decoders
    StructureExhausted,
    InconsistentBlockCount,
    // Reduction circuits
    TargetMismatch,
    LevelBudgetExceeded,
    CapacityExceeded,
    MonotonicityViolation,
    PropertyViolated,
    // Design graphs and simulation
    UnknownDesign,
    BadParameters,
    BadGraph,
    Deadlock,
    // Serialized encodings
    SchemaError,
    IntegrityError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    // The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace sparsespace
