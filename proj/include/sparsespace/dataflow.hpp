#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sparsespace/inverse_map.hpp"
#include "sparsespace/reduction.hpp"

namespace sparsespace {

enum class StageKind { Loader, Decoder, Compute, Reducer, Unloader };
enum class ElementKind { Value, Index, PartialSum, Structure, BlockLabel };

std::string_view to_string(StageKind k) noexcept;
std::string_view to_string(ElementKind k) noexcept;

// Value -> double; Index and Structure -> size_t.
using Token = std::variant<double, std::size_t, PartialSum, BlockLabel>;

// Unbounded FIFO with a single producer and at most one consumer.
class Channel {
public:
    Channel(std::string name, ElementKind kind);

    const std::string& name() const noexcept { return name_; }
    ElementKind kind() const noexcept { return kind_; }

    void push(Token t);  // throws BadGraph on a kind mismatch or after close()
    Token pop();
    const Token& front() const { return queue_.front(); }

    bool empty() const noexcept { return queue_.empty(); }
    std::size_t size() const noexcept { return queue_.size(); }
    void close() noexcept { closed_ = true; }
    bool closed() const noexcept { return closed_; }
    // Closed and drained: nothing more will ever arrive.
    bool exhausted() const noexcept { return closed_ && queue_.empty(); }

    std::size_t produced() const noexcept { return produced_; }
    std::size_t consumed() const noexcept { return consumed_; }

private:
    std::string name_;
    ElementKind kind_;
    std::deque<Token> queue_;
    bool closed_ = false;
    std::size_t produced_ = 0;
    std::size_t consumed_ = 0;
};

using ChannelId = std::size_t;

// One entry per reduction-circuit event; row is empty when the emitting unit
// does not know it (an adder tree sums a block without its row index).
struct ReductionEvent {
    std::string stage;
    std::size_t step = 0;
    std::size_t machine = 0;
    std::optional<std::size_t> row;
    double value = 0.0;
    bool emitted = false;
};

struct StageEvent {
    std::size_t round = 0;
    std::string stage;
    std::size_t consumed = 0;
    std::size_t produced = 0;
};

struct StageCount {
    std::string stage;
    StageKind kind = StageKind::Compute;
    std::size_t consumed = 0;
    std::size_t produced = 0;

    bool operator==(const StageCount&) const = default;
};

struct TraceSummary {
    std::string design;
    std::size_t machines = 0;
    std::size_t stream_length = 0;
    std::size_t nnz = 0;
    std::size_t n_rows = 0;
};

struct Trace {
    TraceSummary summary;
    std::size_t rounds = 0;
    std::vector<StageEvent> events;
    std::vector<ReductionEvent> reductions;
    std::vector<StageCount> totals;  // in stage insertion order

    std::string events_csv() const;      // round,stage,consumed,produced
    std::string reductions_csv() const;  // stage,step,machine,row,value,emitted
};

// A stage's view of its own channels during one firing.
class Ports {
public:
    Ports(std::vector<Channel*> in, std::vector<Channel*> out, std::vector<ReductionEvent>* sink,
          const std::string* stage_name);

    Channel& in(std::size_t k) const { return *in_.at(k); }
    Channel& out(std::size_t k) const { return *out_.at(k); }
    std::size_t inputs() const noexcept { return in_.size(); }
    std::size_t outputs() const noexcept { return out_.size(); }

    bool all_inputs_exhausted() const noexcept;
    void close_outputs() const noexcept;

    void record(std::size_t step, std::size_t machine, std::optional<std::size_t> row, double value,
                bool emitted) const;

private:
    std::vector<Channel*> in_;
    std::vector<Channel*> out_;
    std::vector<ReductionEvent>* sink_;
    const std::string* stage_name_;
};

struct FireResult {
    std::size_t consumed = 0;
    std::size_t produced = 0;
    bool progressed = false;  // also true for closing outputs without moving items
};

class Stage {
public:
    Stage(std::string name, StageKind kind, bool stateful);
    virtual ~Stage() = default;

    const std::string& name() const noexcept { return name_; }
    StageKind kind() const noexcept { return kind_; }
    bool stateful() const noexcept { return stateful_; }
    bool finished() const noexcept { return finished_; }

    // Processes at most `budget` work items; never blocks.
    virtual FireResult fire(const Ports& io, std::size_t budget) = 0;

protected:
    void finish(const Ports& io) {
        io.close_outputs();
        finished_ = true;
    }

private:
    std::string name_;
    StageKind kind_;
    bool stateful_;
    bool finished_ = false;
};

class PipelineGraph {
public:
    ChannelId add_channel(std::string name, ElementKind kind);

    template <typename S, typename... Args>
    S& emplace_stage(std::vector<ChannelId> inputs, std::vector<ChannelId> outputs, Args&&... args) {
        auto stage = std::make_unique<S>(std::forward<Args>(args)...);
        S& ref = *stage;
        add_stage(std::move(stage), std::move(inputs), std::move(outputs));
        return ref;
    }
    void add_stage(std::unique_ptr<Stage> stage, std::vector<ChannelId> inputs, std::vector<ChannelId> outputs);

    std::size_t stage_count() const noexcept { return nodes_.size(); }
    const Stage& stage(std::size_t k) const { return *nodes_.at(k).stage; }
    std::size_t count(StageKind kind) const;
    // Stages whose name starts with `prefix`.
    std::size_t count(std::string_view prefix) const;

    std::size_t channel_count() const noexcept { return channels_.size(); }
    const Channel& channel(ChannelId id) const { return *channels_.at(id); }
    std::optional<ChannelId> find_channel(std::string_view name) const;

    // Every channel has exactly one producer and at most one consumer; the
    // stage graph is acyclic. Throws ErrorCode::BadGraph.
    void validate() const;
    std::vector<std::size_t> topological_order() const;
    // Channels nobody consumes; run() collects them as results.
    std::vector<ChannelId> outputs() const;

    TraceSummary summary;

private:
    friend struct Runner;
    struct Node {
        std::unique_ptr<Stage> stage;
        std::vector<ChannelId> inputs;
        std::vector<ChannelId> outputs;
    };
    std::vector<std::unique_ptr<Channel>> channels_;
    std::vector<Node> nodes_;
};

struct RunOptions {
    // Work items a stage may process per firing; SIZE_MAX lets each stage
    // drain whatever is ready.
    std::size_t budget = std::numeric_limits<std::size_t>::max();
    bool record_events = true;
};

struct RunOutput {
    std::string channel;
    std::vector<Token> tokens;
};

struct RunResult {
    std::vector<RunOutput> outputs;
    Trace trace;

    const std::vector<Token>& output(std::string_view channel) const;
};

// Fires stages in topological rounds until every stage has finished. Throws
// ErrorCode::Deadlock if a round makes no progress first. A graph runs once.
RunResult run(PipelineGraph& graph, const RunOptions& options = {});

struct Stats {
    std::string design;
    std::size_t machines = 0;
    std::size_t stream_length = 0;
    std::size_t nnz = 0;
    std::size_t padded_slots = 0;
    double utilization = 0.0;  // nnz / (machines * stream_length)
    std::vector<StageCount> per_stage;
    std::vector<std::string> warnings;

    std::string to_json(int indent = -1) const;
};

Stats stats(const Trace& trace);

}  // namespace sparsespace
