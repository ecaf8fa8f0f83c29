#pragma once

// Stage implementations shared by the shipped designs.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sparsespace/dataflow.hpp"
#include "sparsespace/inverse_map.hpp"
#include "sparsespace/reduction.hpp"

namespace sparsespace::stages {

// Streams fixed token lanes, lane k into output k.
class LaneLoader final : public Stage {
public:
    LaneLoader(std::string name, std::vector<std::vector<Token>> lanes);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    std::vector<std::vector<Token>> lanes_;
    std::vector<std::size_t> cursor_;
};

// Maps each column index arriving on input k to x(j) on output k.
class XGatherLoader final : public Stage {
public:
    XGatherLoader(std::string name, std::vector<double> x);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    std::vector<double> x_;
};

// Inputs: one row_len lane per machine. Outputs: per machine, the dense row
// of every slot, found by replaying the scheduler.
class RowDecoder final : public Stage {
public:
    RowDecoder(std::string name, std::size_t machines, std::size_t n_rows);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    RowReplayDecoder replay_;
};

// Inputs: values, x values, rows. Output: (row, value * x) partial sums.
class RowMultiplier final : public Stage {
public:
    explicit RowMultiplier(std::string name);
    FireResult fire(const Ports& io, std::size_t budget) override;
};

// Inputs: values, x values. Output: products.
class Multiplier final : public Stage {
public:
    explicit Multiplier(std::string name);
    FireResult fire(const Ports& io, std::size_t budget) override;
};

// One adder serving its input streams round-robin; `stream_ids` are the
// global machine numbers of those streams, used in the reduction log.
class FusedAccumulatorStage final : public Stage {
public:
    FusedAccumulatorStage(std::string name, std::vector<std::size_t> stream_ids, std::size_t synthetic_from);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    FusedAccumulator unit_;
    std::vector<std::size_t> stream_ids_;
    std::vector<std::optional<std::size_t>> last_row_;
    std::size_t step_ = 0;
};

// Sums one block per step from `factor` product lanes with a balanced tree.
class AdderTreeStage final : public Stage {
public:
    AdderTreeStage(std::string name, std::size_t machine, std::size_t levels);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    std::size_t machine_;
    std::size_t levels_;
    std::size_t step_ = 0;
};

// Input: row_blocks. Output: one label per streamed block, in block order.
class BlockDecoder final : public Stage {
public:
    BlockDecoder(std::string name, std::size_t machines, std::size_t total_blocks);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    BlockReplayDecoder replay_;
};

// Inputs: block sums of machines 0..m-1, then the label lane. Per step,
// chains same-row block sums left to right; a sum whose successor belongs to
// another row is added with 0 and handed off alone.
class PairAdder final : public Stage {
public:
    PairAdder(std::string name, std::size_t machines);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    std::size_t machines_;
    std::size_t step_ = 0;
};

class LinearArrayStage final : public Stage {
public:
    LinearArrayStage(std::string name, std::size_t cells);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    LinearArrayReducer array_;
    std::size_t step_ = 0;
};

// Accumulates partial sums into a dense buffer, drops synthetic rows, and
// emits y in ascending row order once every input has ended.
class YUnloader final : public Stage {
public:
    YUnloader(std::string name, std::size_t n_rows);
    FireResult fire(const Ports& io, std::size_t budget) override;

private:
    std::vector<double> y_;
    std::size_t discarded_ = 0;
};

}  // namespace sparsespace::stages
