#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sparsespace/dense.hpp"

namespace sparsespace {

// ============================================================================
// Representation specs: an ordered chain of invertible steps
// ============================================================================

enum class Dim { Rows, Columns, Blocks };
enum class SchedulePolicy { Asap };
enum class PaddingPolicy { Zero };

std::string_view to_string(Dim d) noexcept;

// Pack(Columns) compresses each row to its nonzeros (CSR); Pack(Rows) does the
// same per column.
struct PackStep {
    Dim dim = Dim::Columns;
    std::string index_name = "col_idx";
    std::optional<std::string> length_name = "row_len";

    bool operator==(const PackStep&) const = default;
};

struct BlockStep {
    Dim dim = Dim::Columns;
    std::size_t factor = 1;
    PaddingPolicy padding = PaddingPolicy::Zero;
    std::string count_name = "row_blocks";

    bool operator==(const BlockStep&) const = default;
};

struct ScheduleStep {
    Dim dim = Dim::Rows;
    std::size_t machines = 1;
    SchedulePolicy policy = SchedulePolicy::Asap;
    PaddingPolicy padding = PaddingPolicy::Zero;

    bool operator==(const ScheduleStep&) const = default;
};

using TransformStep = std::variant<PackStep, BlockStep, ScheduleStep>;

struct RepresentationSpec {
    std::string name;
    std::vector<TransformStep> steps;

    bool operator==(const RepresentationSpec&) const = default;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

// Exactly one Pack, at most one Block (after the Pack), exactly one Schedule,
// and the Schedule last. Dimensions must chain consistently.
ValidationReport validate_spec(const RepresentationSpec& spec);

// [Pack(Columns, col_idx, row_len), Schedule(Rows, machines, ASAP, Zero)]
RepresentationSpec cisr_spec(std::size_t machines);
// [Pack(Columns, col_idx), Block(Columns, factor, Zero), Schedule(Blocks, machines, ASAP, Zero)]
RepresentationSpec blocked_spec(std::size_t block_factor, std::size_t machines);

// ============================================================================
// Slots and intermediate representations
// ============================================================================

struct Coord {
    std::size_t row = 0;
    std::size_t col = 0;

    auto operator<=>(const Coord&) const = default;
};

// Where a stream slot came from in the dense matrix; nullopt marks padding.
using SlotOrigin = std::optional<Coord>;

struct Slot {
    double value = 0.0;
    std::size_t index = 0;  // recorded index along the packed dimension
    SlotOrigin origin;

    bool operator==(const Slot&) const = default;
};

// A packed line (a row for Pack(Columns)) or one block of a line.
struct Job {
    std::size_t major = 0;
    std::vector<Slot> slots;
};

struct PackedMatrix {
    Dim dim = Dim::Columns;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<Job> lines;  // one per row (Columns) or per column (Rows), in order

    std::vector<std::size_t> lengths() const;
};

PackedMatrix pack(const DenseMatrix& a, Dim dim);

struct BlockedMatrix {
    Dim dim = Dim::Columns;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t factor = 1;
    std::vector<Job> blocks;              // row-major: all blocks of line 0, then line 1, ...
    std::vector<std::size_t> row_blocks;  // blocks per packed line

    std::size_t padded_slots() const;
};

// Splits each packed line into ceil(len / factor) blocks of exactly `factor`
// slots; the last block of a line is zero-padded.
BlockedMatrix block(const PackedMatrix& p, std::size_t factor);

// ============================================================================
// Encoded (scheduled) matrix
// ============================================================================

struct RowLengths {
    // Per machine, lengths of consecutive line segments. Padding extends the
    // final segment; a machine with no jobs carries one all-padding segment.
    std::vector<std::vector<std::size_t>> per_machine;

    bool operator==(const RowLengths&) const = default;
};

struct RowBlocks {
    std::vector<std::size_t> counts;  // blocks per dense line, global
    std::size_t factor = 1;

    bool operator==(const RowBlocks&) const = default;
};

using Structure = std::variant<RowLengths, RowBlocks>;

struct EncodedMatrix {
    std::size_t machines = 0;
    std::size_t stream_length = 0;
    std::vector<std::vector<double>> values;       // A.values(i', j')
    std::vector<std::vector<std::size_t>> col_idx; // recorded packed-dimension index per slot
    Structure structure;
    std::vector<std::vector<SlotOrigin>> provenance;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    RepresentationSpec spec;

    Dim packed_dim() const;
    // Number of dense lines the jobs were cut from (rows for Pack(Columns)).
    std::size_t major_extent() const;
    std::size_t nnz() const;
    std::size_t padded_slots() const;

    bool operator==(const EncodedMatrix&) const = default;
};

// Greedy list scheduling: each job, in order, goes to the machine with the
// smallest accumulated slot count; ties go to the lowest machine index.
std::vector<std::size_t> asap_assignment(std::span<const std::size_t> job_lengths, std::size_t machines);

// Schedules packed lines as jobs, then zero-pads every machine to the
// longest stream. Records row_len structure and per-slot provenance.
EncodedMatrix schedule_asap(const PackedMatrix& p, std::size_t machines);
// Schedules blocks as jobs. Whole zero blocks pad short machines.
EncodedMatrix schedule_asap(const BlockedMatrix& b, std::size_t machines);

EncodedMatrix encode(const DenseMatrix& a, const RepresentationSpec& spec);

}  // namespace sparsespace
