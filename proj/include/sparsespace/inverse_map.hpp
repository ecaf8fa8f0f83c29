#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sparsespace/dense.hpp"
#include "sparsespace/transform.hpp"

namespace sparsespace {

// (i', j'): machine identifier and position within that machine's stream.
struct SlotPos {
    std::size_t machine = 0;
    std::size_t position = 0;

    auto operator<=>(const SlotPos&) const = default;
};

// Total function (i', j') -> origin (i, j) or padding, plus its inverse on
// the nonzero support.
class InverseMap {
public:
    InverseMap(std::size_t machines, std::size_t stream_length, std::size_t n_rows, std::size_t n_cols,
               std::vector<SlotOrigin> table);

    std::size_t machines() const noexcept { return machines_; }
    std::size_t stream_length() const noexcept { return stream_length_; }
    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_cols() const noexcept { return n_cols_; }

    // Throws ErrorCode::OutOfBounds outside {0..m-1} x {0..L-1}.
    const SlotOrigin& at(std::size_t machine, std::size_t position) const;
    const SlotOrigin& at(SlotPos p) const { return at(p.machine, p.position); }

    // The slot holding A(i, j), or nullopt when A(i, j) == 0.
    std::optional<SlotPos> forward(std::size_t i, std::size_t j) const;

private:
    std::size_t machines_;
    std::size_t stream_length_;
    std::size_t n_rows_;
    std::size_t n_cols_;
    std::vector<SlotOrigin> table_;
    std::unordered_map<std::size_t, SlotPos> forward_;
};

// Built from the provenance recorded while each invertible step was applied.
// Throws ErrorCode::IntegrityError if two slots claim the same (i, j).
InverseMap build_inverse_map(const EncodedMatrix& e);

std::optional<SlotPos> forward_map(const InverseMap& im, std::size_t i, std::size_t j);

// ============================================================================
// Streaming decoders: recover dense indices from structure streams alone
// ============================================================================

// Replays the ASAP scheduler over row_len entries. Each machine's consumed
// length plays the role of its load; the next entry comes from the
// least-consumed machine that still has entries (ties: lowest index) and is
// labelled with the next dense row. Labels >= n_rows are synthetic.
//
// Pad-inflated final segments are safe: they only raise the consumed count of
// a machine that the scheduler never picks again.
class RowReplayDecoder {
public:
    RowReplayDecoder(std::size_t machines, std::size_t n_rows);

    // Machine whose next entry the replay needs, skipping machines flagged
    // as having no entries left. nullopt once every machine is exhausted.
    std::optional<std::size_t> next_machine(const std::vector<bool>& exhausted) const;

    // Accounts for one row_len entry popped from `machine`; returns its row.
    std::size_t take(std::size_t machine, std::size_t length);

    std::size_t labelled() const noexcept { return next_row_; }
    std::size_t n_rows() const noexcept { return n_rows_; }

private:
    std::vector<std::size_t> consumed_;
    std::size_t next_row_ = 0;
    std::size_t n_rows_;
};

// Per-slot dense row index for each machine, derived from row_len streams
// and n_rows only. Throws ErrorCode::StructureExhausted if the entries run out
// before every row is labelled.
std::vector<std::vector<std::size_t>> streaming_row_decoder(const std::vector<std::vector<std::size_t>>& row_len,
                                                            std::size_t n_rows);

struct BlockLabel {
    std::size_t block = 0;    // global block index b = machines * step + machine
    std::size_t machine = 0;
    std::size_t step = 0;
    std::size_t row = 0;      // >= number of dense rows for zeroed padding blocks
    bool same_row_as_previous_machine = false;

    bool operator==(const BlockLabel&) const = default;
};

// Walks prefix sums of row_blocks. Blocks are round-robin (machine = b mod m)
// because every block job has the same length. Padding blocks beyond the
// real total get distinct synthetic rows, so they never pair.
class BlockReplayDecoder {
public:
    BlockReplayDecoder(std::size_t machines, std::size_t total_blocks);

    bool done() const noexcept { return emitted_ == total_blocks_; }
    // True when the next label cannot be produced without another count.
    bool needs_count() const noexcept { return !done() && remaining_ == 0 && !counts_closed_; }

    void push_count(std::size_t count);
    void close_counts();

    // Next label, or nullopt if a count is needed first or all are emitted.
    std::optional<BlockLabel> next();

    // Throws InconsistentBlockCount if counts remain once every block is
    // labelled, or padding exceeds what machine alignment allows.
    void finish() const;

private:
    std::size_t machines_;
    std::size_t total_blocks_;
    std::size_t emitted_ = 0;
    std::size_t rows_seen_ = 0;
    std::size_t current_row_ = 0;
    std::size_t remaining_ = 0;
    std::size_t synthetic_ = 0;
    std::size_t leftover_ = 0;
    std::size_t previous_row_ = 0;
    bool counts_closed_ = false;
};

// total_blocks is the padded block count (machines * steps). Throws
// ErrorCode::InconsistentBlockCount when sum(row_blocks) cannot be the real
// block count for that padded total.
std::vector<BlockLabel> streaming_block_decoder(std::span<const std::size_t> row_blocks, std::size_t factor,
                                                std::size_t machines, std::size_t total_blocks);

// Expands block labels to one row index per stream slot, per machine.
std::vector<std::vector<std::size_t>> block_slot_rows(std::span<const BlockLabel> labels, std::size_t factor,
                                                      std::size_t machines);

// Runs whichever streaming decoder matches the encoding's structure.
std::vector<std::vector<std::size_t>> decode_slot_rows(const EncodedMatrix& e);

// Scatters every non-padding slot to its inverse-mapped (i, j).
DenseMatrix decode(const EncodedMatrix& e);

struct RoundtripReport {
    bool passed = true;
    std::size_t checked_slots = 0;
    std::optional<SlotPos> offending_slot;
    std::vector<std::string> problems;
};

RoundtripReport check_roundtrip(const EncodedMatrix& e, const DenseMatrix& a);

struct IntegrityReport {
    std::vector<std::string> problems;

    bool ok() const noexcept { return problems.empty(); }
};

// Semantic checks on a (possibly deserialized) encoding: stream shapes,
// structure totals, provenance bounds and uniqueness, padding values,
// recorded indices, and agreement between the streaming decoder and
// provenance.
IntegrityReport verify_integrity(const EncodedMatrix& e);

}  // namespace sparsespace
