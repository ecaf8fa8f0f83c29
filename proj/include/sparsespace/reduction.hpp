#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace sparsespace {

// A (dense row, accumulated value) record flowing between reduction levels.
// Rows >= the matrix's row count are synthetic and carry padding only.
struct PartialSum {
    std::size_t row = 0;
    double value = 0.0;

    bool operator==(const PartialSum&) const = default;
};

inline constexpr std::size_t kNoSynthetic = std::numeric_limits<std::size_t>::max();

// ============================================================================
// Reduction properties
// ============================================================================

// Equal row indices form contiguous runs: no row recurs after another
// intervened.
bool check_continuous(std::span<const std::size_t> rows);

// At every step, machines reduce into pairwise distinct rows. Rows >=
// synthetic_from are exempt. Streams must be equally long.
bool check_distinct(const std::vector<std::vector<std::size_t>>& streams, std::size_t synthetic_from = kNoSynthetic);

struct ReductionProps {
    bool continuous_per_machine = false;
    bool distinct_across_machines = false;
    std::optional<std::size_t> max_run_per_target;  // recorded for statistics only
};

ReductionProps analyze_reduction(const std::vector<std::vector<std::size_t>>& streams,
                                 std::size_t synthetic_from = kNoSynthetic);

// ============================================================================
// Isolation: first-level local sums
// ============================================================================

// Accumulates consecutive same-row items; hands the local sum downstream,
// tagged with its row, whenever the row changes or the stream ends.
class RunAccumulator {
public:
    std::optional<PartialSum> push(PartialSum item);
    std::optional<PartialSum> flush();
    bool holding() const noexcept { return current_.has_value(); }

private:
    std::optional<PartialSum> current_;
};

std::vector<PartialSum> isolate_reduction(std::span<const PartialSum> items);
std::vector<std::vector<PartialSum>> isolate_reduction(const std::vector<std::vector<PartialSum>>& per_machine);

// ============================================================================
// Combining reductions across machines (loop i')
// ============================================================================

// Same_Targets: per step, sum the m values in ascending machine order.
std::vector<double> combine_same_target(const std::vector<std::vector<double>>& steps);
// As above, but first verifies against a row trace that all machines share
// the step's target; throws ErrorCode::TargetMismatch otherwise.
std::vector<double> combine_same_target(const std::vector<std::vector<double>>& steps,
                                        const std::vector<std::vector<std::size_t>>& step_rows);

// Maybe_different_Targets, one step: scan machines in ascending order,
// accumulate while the row matches the current one, otherwise hand off
// (current_row, sum) and restart; hand off the final sum after the scan.
void combine_maybe_different_step(std::span<const PartialSum> step, std::vector<PartialSum>& out);
std::vector<PartialSum> combine_maybe_different(const std::vector<std::vector<PartialSum>>& steps);

// ============================================================================
// Reduction circuits
// ============================================================================

// Levels a balanced binary adder tree needs for n inputs: ceil(log2(max(n, 1))).
std::size_t tree_levels(std::size_t n) noexcept;

// Pairwise balanced-tree sum. Throws ErrorCode::LevelBudgetExceeded when
// tree_levels(values.size()) > max_levels.
double tree_reduce(std::span<const double> values, std::size_t max_levels);

// Linear array of `cells` (row, sum) buffers. A record for a buffered row
// accumulates in place; a new row takes a free cell. Arrival of row r
// finalizes every buffered row below r, and the end of stream flushes the
// rest; finalized rows leave in ascending order.
//
// Nondecreasing input keeps a single cell busy. An arrival for a row that
// was already finalized is a MonotonicityViolation; more than `cells`
// distinct unfinalized rows is CapacityExceeded.
class LinearArrayReducer {
public:
    explicit LinearArrayReducer(std::size_t cells);

    void push(PartialSum record, std::vector<PartialSum>& out);
    void flush(std::vector<PartialSum>& out);

    std::size_t cells() const noexcept { return cells_; }
    std::size_t occupied() const noexcept { return buffer_.size(); }

private:
    struct Cell {
        std::size_t row;
        double sum;
    };
    std::size_t cells_;
    std::vector<Cell> buffer_;  // kept sorted by row
    std::optional<std::size_t> watermark_;  // highest finalized row
};

std::vector<PartialSum> linear_array_reduce(std::span<const PartialSum> input, std::size_t cells);

// One adder shared round-robin by several streams, with one (row, sum)
// register per stream. A register is emitted when its stream's row changes
// and when the stream ends. Continuity per stream and distinctness across
// the adder's streams are checked as items arrive (ErrorCode::PropertyViolated).
class FusedAccumulator {
public:
    explicit FusedAccumulator(std::size_t streams, std::size_t synthetic_from = kNoSynthetic);

    // Items of one round-robin turn: one optional item per stream (nullopt
    // for a stream that has ended).
    void step(std::span<const std::optional<PartialSum>> items, std::vector<PartialSum>& out);
    void flush(std::vector<PartialSum>& out);

    std::size_t streams() const noexcept { return registers_.size(); }

private:
    std::vector<RunAccumulator> registers_;
    std::vector<std::set<std::size_t>> closed_;  // rows each stream has finished
    std::size_t synthetic_from_;
    std::size_t steps_ = 0;
};

// `adders` adders; stream s is served by adder s mod adders (the i' loop
// split by the adder count). Emissions are ordered by (step, adder, stream).
// Throws PropertyViolated unless every stream is continuous and the streams
// are distinct at every step.
std::vector<PartialSum> fused_accumulator(const std::vector<std::vector<PartialSum>>& streams, std::size_t adders,
                                          std::size_t synthetic_from = kNoSynthetic);

}  // namespace sparsespace
