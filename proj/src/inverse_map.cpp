#include "sparsespace/inverse_map.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sparsespace/error.hpp"

namespace sparsespace {

namespace {

std::string slot_text(std::size_t machine, std::size_t pos) {
    return "slot (M" + std::to_string(machine) + ", " + std::to_string(pos) + ")";
}

std::string coord_text(const Coord& c) { return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")"; }

// Dense index along the scheduled lines: the row for Pack(Columns).
std::size_t major_of(const Coord& c, Dim packed) { return packed == Dim::Columns ? c.row : c.col; }
std::size_t minor_of(const Coord& c, Dim packed) { return packed == Dim::Columns ? c.col : c.row; }

}  // namespace

// ============================================================================
// InverseMap
// ============================================================================

InverseMap::InverseMap(std::size_t machines, std::size_t stream_length, std::size_t n_rows, std::size_t n_cols,
                       std::vector<SlotOrigin> table)
    : machines_(machines), stream_length_(stream_length), n_rows_(n_rows), n_cols_(n_cols), table_(std::move(table)) {
    if (table_.size() != machines_ * stream_length_) {
        throw Error(ErrorCode::DimensionMismatch, "inverse map table must have m*L entries");
    }
    for (std::size_t m = 0; m < machines_; ++m) {
        for (std::size_t p = 0; p < stream_length_; ++p) {
            const auto& o = table_[m * stream_length_ + p];
            if (!o) continue;
            if (o->row >= n_rows_ || o->col >= n_cols_) {
                throw Error(ErrorCode::IntegrityError, slot_text(m, p) + " maps outside the matrix to " + coord_text(*o));
            }
            auto [it, inserted] = forward_.emplace(o->row * n_cols_ + o->col, SlotPos{m, p});
            if (!inserted) {
                throw Error(ErrorCode::IntegrityError, slot_text(m, p) + " and " +
                                                           slot_text(it->second.machine, it->second.position) +
                                                           " both map to " + coord_text(*o));
            }
        }
    }
}

const SlotOrigin& InverseMap::at(std::size_t machine, std::size_t position) const {
    if (machine >= machines_ || position >= stream_length_) {
        throw Error(ErrorCode::OutOfBounds, slot_text(machine, position) + " outside " + std::to_string(machines_) +
                                                " machines x " + std::to_string(stream_length_) + " positions");
    }
    return table_[machine * stream_length_ + position];
}

std::optional<SlotPos> InverseMap::forward(std::size_t i, std::size_t j) const {
    if (i >= n_rows_ || j >= n_cols_) {
        throw Error(ErrorCode::OutOfBounds, coord_text({i, j}) + " outside " + std::to_string(n_rows_) + "x" +
                                                std::to_string(n_cols_));
    }
    auto it = forward_.find(i * n_cols_ + j);
    if (it == forward_.end()) return std::nullopt;
    return it->second;
}

InverseMap build_inverse_map(const EncodedMatrix& e) {
    std::vector<SlotOrigin> table;
    table.reserve(e.machines * e.stream_length);
    for (const auto& stream : e.provenance) {
        if (stream.size() != e.stream_length) {
            throw Error(ErrorCode::IntegrityError, "provenance stream length differs from stream_length");
        }
        table.insert(table.end(), stream.begin(), stream.end());
    }
    if (e.provenance.size() != e.machines) {
        throw Error(ErrorCode::IntegrityError, "provenance must hold one stream per machine");
    }
    return InverseMap(e.machines, e.stream_length, e.n_rows, e.n_cols, std::move(table));
}

std::optional<SlotPos> forward_map(const InverseMap& im, std::size_t i, std::size_t j) { return im.forward(i, j); }

// ============================================================================
// Row decoder
// ============================================================================

RowReplayDecoder::RowReplayDecoder(std::size_t machines, std::size_t n_rows)
    : consumed_(machines, 0), n_rows_(n_rows) {}

std::optional<std::size_t> RowReplayDecoder::next_machine(const std::vector<bool>& exhausted) const {
    std::optional<std::size_t> best;
    for (std::size_t m = 0; m < consumed_.size(); ++m) {
        if (exhausted[m]) continue;
        if (!best || consumed_[m] < consumed_[*best]) best = m;
    }
    return best;
}

std::size_t RowReplayDecoder::take(std::size_t machine, std::size_t length) {
    consumed_.at(machine) += length;
    return next_row_++;
}

std::vector<std::vector<std::size_t>> streaming_row_decoder(const std::vector<std::vector<std::size_t>>& row_len,
                                                            std::size_t n_rows) {
    const std::size_t machines = row_len.size();
    RowReplayDecoder decoder(machines, n_rows);
    std::vector<std::size_t> next_entry(machines, 0);
    std::vector<bool> exhausted(machines);
    std::vector<std::vector<std::size_t>> rows(machines);

    for (;;) {
        for (std::size_t m = 0; m < machines; ++m) exhausted[m] = next_entry[m] == row_len[m].size();
        const auto m = decoder.next_machine(exhausted);
        if (!m) break;
        const std::size_t len = row_len[*m][next_entry[*m]++];
        const std::size_t row = decoder.take(*m, len);
        rows[*m].insert(rows[*m].end(), len, row);
    }
    if (decoder.labelled() < n_rows) {
        throw Error(ErrorCode::StructureExhausted, "row_len entries ran out after " +
                                                       std::to_string(decoder.labelled()) + " of " +
                                                       std::to_string(n_rows) + " rows");
    }
    return rows;
}

// ============================================================================
// Block decoder
// ============================================================================

BlockReplayDecoder::BlockReplayDecoder(std::size_t machines, std::size_t total_blocks)
    : machines_(machines), total_blocks_(total_blocks) {
    if (machines_ == 0) throw Error(ErrorCode::ZeroMachines, "block decoder needs at least one machine");
    if (total_blocks_ % machines_ != 0) {
        throw Error(ErrorCode::InconsistentBlockCount, "padded block total " + std::to_string(total_blocks_) +
                                                           " is not a multiple of " + std::to_string(machines_) +
                                                           " machines");
    }
}

void BlockReplayDecoder::push_count(std::size_t count) {
    if (done()) {
        leftover_ += count;
        ++rows_seen_;
        return;
    }
    if (remaining_ != 0 || counts_closed_) {
        throw Error(ErrorCode::InconsistentBlockCount, "row_blocks entry arrived while not needed");
    }
    current_row_ = rows_seen_++;
    remaining_ = count;
}

void BlockReplayDecoder::close_counts() { counts_closed_ = true; }

std::optional<BlockLabel> BlockReplayDecoder::next() {
    if (done()) return std::nullopt;
    std::size_t row = 0;
    if (remaining_ > 0) {
        row = current_row_;
        --remaining_;
    } else if (counts_closed_) {
        row = rows_seen_ + synthetic_++;
    } else {
        return std::nullopt;
    }
    BlockLabel label;
    label.block = emitted_;
    label.machine = emitted_ % machines_;
    label.step = emitted_ / machines_;
    label.row = row;
    label.same_row_as_previous_machine = label.machine > 0 && row == previous_row_;
    previous_row_ = row;
    ++emitted_;
    return label;
}

void BlockReplayDecoder::finish() const {
    if (!done()) {
        throw Error(ErrorCode::InconsistentBlockCount, "only " + std::to_string(emitted_) + " of " +
                                                           std::to_string(total_blocks_) + " blocks labelled");
    }
    if (remaining_ != 0 || leftover_ != 0) {
        throw Error(ErrorCode::InconsistentBlockCount, "row_blocks describe more blocks than the " +
                                                           std::to_string(total_blocks_) + " streamed");
    }
    if (synthetic_ >= machines_) {
        throw Error(ErrorCode::InconsistentBlockCount, std::to_string(synthetic_) +
                                                           " padding blocks exceed machine alignment");
    }
}

std::vector<BlockLabel> streaming_block_decoder(std::span<const std::size_t> row_blocks, std::size_t factor,
                                                std::size_t machines, std::size_t total_blocks) {
    if (factor == 0) throw Error(ErrorCode::InvalidArgument, "block factor must be at least 1");
    const std::size_t real = std::accumulate(row_blocks.begin(), row_blocks.end(), std::size_t{0});
    if (machines == 0) throw Error(ErrorCode::ZeroMachines, "block decoder needs at least one machine");
    if (real > total_blocks || total_blocks - real >= machines || total_blocks % machines != 0) {
        throw Error(ErrorCode::InconsistentBlockCount,
                    "row_blocks sum to " + std::to_string(real) + " which does not fit a padded total of " +
                        std::to_string(total_blocks) + " over " + std::to_string(machines) + " machines");
    }

    BlockReplayDecoder decoder(machines, total_blocks);
    std::vector<BlockLabel> labels;
    labels.reserve(total_blocks);
    std::size_t next = 0;
    while (!decoder.done()) {
        if (decoder.needs_count()) {
            if (next < row_blocks.size()) {
                decoder.push_count(row_blocks[next++]);
            } else {
                decoder.close_counts();
            }
            continue;
        }
        labels.push_back(*decoder.next());
    }
    while (next < row_blocks.size()) decoder.push_count(row_blocks[next++]);
    decoder.finish();
    return labels;
}

std::vector<std::vector<std::size_t>> block_slot_rows(std::span<const BlockLabel> labels, std::size_t factor,
                                                      std::size_t machines) {
    std::vector<std::vector<std::size_t>> rows(machines);
    for (const auto& l : labels) rows.at(l.machine).insert(rows[l.machine].end(), factor, l.row);
    return rows;
}

std::vector<std::vector<std::size_t>> decode_slot_rows(const EncodedMatrix& e) {
    if (const auto* rl = std::get_if<RowLengths>(&e.structure)) {
        return streaming_row_decoder(rl->per_machine, e.major_extent());
    }
    const auto& rb = std::get<RowBlocks>(e.structure);
    if (rb.factor == 0 || e.stream_length % rb.factor != 0) {
        throw Error(ErrorCode::InconsistentBlockCount, "stream length is not a whole number of blocks");
    }
    const std::size_t total = e.machines * (e.stream_length / rb.factor);
    const auto labels = streaming_block_decoder(rb.counts, rb.factor, e.machines, total);
    return block_slot_rows(labels, rb.factor, e.machines);
}

// ============================================================================
// Decode and checks
// ============================================================================

DenseMatrix decode(const EncodedMatrix& e) {
    const InverseMap im = build_inverse_map(e);
    DenseMatrix a(e.n_rows, e.n_cols);
    for (std::size_t m = 0; m < e.machines; ++m) {
        for (std::size_t p = 0; p < e.stream_length; ++p) {
            if (const auto& o = im.at(m, p)) a(o->row, o->col) = e.values[m][p];
        }
    }
    return a;
}

RoundtripReport check_roundtrip(const EncodedMatrix& e, const DenseMatrix& a) {
    RoundtripReport r;
    auto fail = [&r](std::optional<SlotPos> slot, std::string msg) {
        if (r.passed && slot) r.offending_slot = slot;
        r.passed = false;
        r.problems.push_back(std::move(msg));
    };

    if (e.n_rows != a.rows() || e.n_cols != a.cols()) {
        fail(std::nullopt, "encoding is " + std::to_string(e.n_rows) + "x" + std::to_string(e.n_cols) +
                               ", matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
        return r;
    }

    std::vector<bool> covered(a.rows() * a.cols(), false);
    for (std::size_t m = 0; m < e.machines; ++m) {
        for (std::size_t p = 0; p < e.stream_length; ++p) {
            const double v = e.values[m][p];
            const auto& o = e.provenance[m][p];
            if (!o) {
                if (v != 0.0) fail(SlotPos{m, p}, slot_text(m, p) + " is padding but holds " + std::to_string(v));
                continue;
            }
            ++r.checked_slots;
            if (o->row >= a.rows() || o->col >= a.cols()) {
                fail(SlotPos{m, p}, slot_text(m, p) + " maps outside the matrix to " + coord_text(*o));
                continue;
            }
            const std::size_t flat = o->row * a.cols() + o->col;
            if (covered[flat]) fail(SlotPos{m, p}, slot_text(m, p) + " duplicates " + coord_text(*o));
            covered[flat] = true;
            if (v != a(o->row, o->col) || v == 0.0) {
                fail(SlotPos{m, p}, slot_text(m, p) + " holds " + std::to_string(v) + " but A" + coord_text(*o) +
                                        " = " + std::to_string(a(o->row, o->col)));
            }
        }
    }
    std::size_t missing = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0.0 && !covered[i * a.cols() + j]) ++missing;
        }
    }
    if (missing > 0) fail(std::nullopt, std::to_string(missing) + " nonzeros have no slot");
    return r;
}

IntegrityReport verify_integrity(const EncodedMatrix& e) {
    IntegrityReport r;
    auto& problems = r.problems;
    constexpr std::size_t kMaxProblems = 32;
    auto add = [&problems](std::string msg) {
        if (problems.size() < kMaxProblems) problems.push_back(std::move(msg));
    };

    const auto spec_report = validate_spec(e.spec);
    for (const auto& v : spec_report.violations) add("spec: " + v);
    if (!spec_report.ok()) return r;

    const BlockStep* block_step = nullptr;
    for (const auto& step : e.spec.steps) {
        if (const auto* b = std::get_if<BlockStep>(&step)) block_step = b;
        if (const auto* s = std::get_if<ScheduleStep>(&step); s && s->machines != e.machines) {
            add("spec schedules " + std::to_string(s->machines) + " machines, encoding has " +
                std::to_string(e.machines));
        }
    }
    if (e.n_rows == 0 || e.n_cols == 0) add("origin dimensions must be positive");
    if (e.values.size() != e.machines || e.col_idx.size() != e.machines || e.provenance.size() != e.machines) {
        add("values, col_idx and provenance must each hold one stream per machine");
        return r;
    }
    for (std::size_t m = 0; m < e.machines; ++m) {
        if (e.values[m].size() != e.stream_length || e.col_idx[m].size() != e.stream_length ||
            e.provenance[m].size() != e.stream_length) {
            add("machine " + std::to_string(m) + " streams differ from stream_length " +
                std::to_string(e.stream_length));
        }
    }
    if (!problems.empty()) return r;

    const std::size_t major = e.major_extent();
    if (const auto* rl = std::get_if<RowLengths>(&e.structure)) {
        if (block_step) add("spec has a Block step but the structure is row_len");
        if (rl->per_machine.size() != e.machines) {
            add("row_len must hold one list per machine");
        } else {
            std::size_t entries = 0;
            for (std::size_t m = 0; m < e.machines; ++m) {
                const auto& lens = rl->per_machine[m];
                entries += lens.size();
                const auto sum = std::accumulate(lens.begin(), lens.end(), std::size_t{0});
                if (sum != e.stream_length) {
                    add("row_len of machine " + std::to_string(m) + " sums to " + std::to_string(sum) +
                        ", expected " + std::to_string(e.stream_length));
                }
            }
            if (entries < major) add("row_len has fewer entries than the matrix has lines");
        }
    } else {
        const auto& rb = std::get<RowBlocks>(e.structure);
        if (!block_step) add("structure is row_blocks but the spec has no Block step");
        if (block_step && block_step->factor != rb.factor) add("row_blocks factor differs from the spec's block factor");
        if (rb.counts.size() != major) add("row_blocks must hold one count per line");
        if (rb.factor == 0 || e.stream_length % rb.factor != 0) add("stream length is not a whole number of blocks");
    }
    if (!problems.empty()) return r;

    const Dim packed = e.packed_dim();
    std::set<Coord> seen;
    for (std::size_t m = 0; m < e.machines; ++m) {
        for (std::size_t p = 0; p < e.stream_length; ++p) {
            const auto& o = e.provenance[m][p];
            const double v = e.values[m][p];
            if (!o) {
                if (v != 0.0) add(slot_text(m, p) + " is padding but its value is not 0");
                if (e.col_idx[m][p] != 0) add(slot_text(m, p) + " is padding but its index is not 0");
                continue;
            }
            if (o->row >= e.n_rows || o->col >= e.n_cols) {
                add(slot_text(m, p) + " maps outside the matrix to " + coord_text(*o));
                continue;
            }
            if (!seen.insert(*o).second) add(slot_text(m, p) + " duplicates origin " + coord_text(*o));
            if (v == 0.0) add(slot_text(m, p) + " maps to " + coord_text(*o) + " but holds 0");
            if (e.col_idx[m][p] != minor_of(*o, packed)) {
                add(slot_text(m, p) + " records index " + std::to_string(e.col_idx[m][p]) + " but maps to " +
                    coord_text(*o));
            }
        }
    }
    if (!problems.empty()) return r;

    try {
        const auto rows = decode_slot_rows(e);
        for (std::size_t m = 0; m < e.machines; ++m) {
            for (std::size_t p = 0; p < e.stream_length; ++p) {
                const auto& o = e.provenance[m][p];
                if (o && rows[m][p] != major_of(*o, packed)) {
                    add(slot_text(m, p) + " decodes to line " + std::to_string(rows[m][p]) + " but maps to " +
                        coord_text(*o));
                }
            }
        }
    } catch (const Error& err) {
        add(std::string("structure does not decode: ") + err.what());
    }
    return r;
}

}  // namespace sparsespace
