#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sparsespace/dataflow.hpp"
#include "sparsespace/dense.hpp"
#include "sparsespace/transform.hpp"

namespace sparsespace {

// CISR SpMV: rows ASAP-scheduled over `machines` streams, products reduced
// by `adders` fused accumulators, each serving machines / adders streams.
struct CisrDesignParams {
    std::size_t machines = 4;
    std::size_t adders = 2;

    bool operator==(const CisrDesignParams&) const = default;
};

// Blocked SpMV: rows cut into blocks of k/2 nonzeros, blocks ASAP-scheduled
// over `machines`; per machine k/2 multipliers feed an adder tree, block sums
// of neighbouring machines pair up, and a linear array of
// `linear_array_levels` cells finishes each row.
struct BlockedDesignParams {
    std::size_t k = 4;
    std::size_t machines = 2;
    std::size_t linear_array_levels = 4;

    std::size_t block_factor() const noexcept { return k / 2; }
    bool operator==(const BlockedDesignParams&) const = default;
};

using DesignParams = std::variant<CisrDesignParams, BlockedDesignParams>;

// Throw ErrorCode::BadParameters.
void validate(const CisrDesignParams& p);
void validate(const BlockedDesignParams& p);

// A design addressed by name ("cisr" or "blocked") with optional overrides;
// unset fields take the design's defaults.
struct DesignDescriptor {
    std::string name;
    std::optional<std::size_t> machines;
    std::optional<std::size_t> adders;  // cisr only
    std::optional<std::size_t> k;       // blocked only
    std::optional<std::size_t> levels;  // blocked only
};

std::vector<std::string> design_names();

// Throws ErrorCode::UnknownDesign for an unknown name and BadParameters for
// invalid values or overrides the design does not take.
DesignParams resolve(const DesignDescriptor& d);
std::string design_name(const DesignParams& p);
std::size_t machines_of(const DesignParams& p);

RepresentationSpec spec_for(const DesignParams& p);
EncodedMatrix encode_for(const DenseMatrix& a, const DesignParams& p);

// Wires loaders bound to `e` and `x`, decoders, compute units, reduction
// circuits, and the y unloader. The graph's single output channel is "y".
// Throws BadParameters if `e` was not encoded for this design and
// DimensionMismatch if x does not match the column count.
PipelineGraph build_graph(const DesignParams& p, const EncodedMatrix& e, const DenseVector& x);
PipelineGraph build_graph(const DesignDescriptor& d, const EncodedMatrix& e, const DenseVector& x);

struct SpmvResult {
    DenseVector y;
    Trace trace;
    EncodedMatrix encoded;
};

// Runs an already-encoded matrix through the design's graph.
SpmvResult run_encoded(const DesignParams& p, const EncodedMatrix& e, const DenseVector& x,
                       const RunOptions& options = {});

SpmvResult design_cisr_spmv(const DenseMatrix& a, const DenseVector& x, const CisrDesignParams& p = {},
                            const RunOptions& options = {});
SpmvResult design_blocked_spmv(const DenseMatrix& a, const DenseVector& x, const BlockedDesignParams& p = {},
                               const RunOptions& options = {});
SpmvResult run_design(const DesignParams& p, const DenseMatrix& a, const DenseVector& x,
                      const RunOptions& options = {});
SpmvResult run_design(const DesignDescriptor& d, const DenseMatrix& a, const DenseVector& x,
                      const RunOptions& options = {});

}  // namespace sparsespace
