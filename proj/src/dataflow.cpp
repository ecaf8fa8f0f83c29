#include "sparsespace/dataflow.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "sparsespace/error.hpp"

namespace sparsespace {

namespace {

bool token_matches(const Token& t, ElementKind kind) {
    switch (kind) {
        case ElementKind::Value:
            return std::holds_alternative<double>(t);
        case ElementKind::Index:
        case ElementKind::Structure:
            return std::holds_alternative<std::size_t>(t);
        case ElementKind::PartialSum:
            return std::holds_alternative<PartialSum>(t);
        case ElementKind::BlockLabel:
            return std::holds_alternative<BlockLabel>(t);
    }
    return false;
}

}  // namespace

std::string_view to_string(StageKind k) noexcept {
    switch (k) {
        case StageKind::Loader: return "loader";
        case StageKind::Decoder: return "decoder";
        case StageKind::Compute: return "compute";
        case StageKind::Reducer: return "reducer";
        case StageKind::Unloader: return "unloader";
    }
    return "?";
}

std::string_view to_string(ElementKind k) noexcept {
    switch (k) {
        case ElementKind::Value: return "value";
        case ElementKind::Index: return "index";
        case ElementKind::PartialSum: return "partial_sum";
        case ElementKind::Structure: return "structure";
        case ElementKind::BlockLabel: return "block_label";
    }
    return "?";
}

// ----------------------------------------------------------------------------
// Channel
// ----------------------------------------------------------------------------

Channel::Channel(std::string name, ElementKind kind) : name_(std::move(name)), kind_(kind) {}

void Channel::push(Token t) {
    if (closed_) throw Error(ErrorCode::BadGraph, "push to closed channel '" + name_ + "'");
    if (!token_matches(t, kind_))
        throw Error(ErrorCode::BadGraph,
                    "channel '" + name_ + "' carries " + std::string(to_string(kind_)) + " items");
    queue_.push_back(std::move(t));
    ++produced_;
}

Token Channel::pop() {
    if (queue_.empty()) throw Error(ErrorCode::BadGraph, "pop from empty channel '" + name_ + "'");
    Token t = std::move(queue_.front());
    queue_.pop_front();
    ++consumed_;
    return t;
}

// ----------------------------------------------------------------------------
// Ports and stages
// ----------------------------------------------------------------------------

Ports::Ports(std::vector<Channel*> in, std::vector<Channel*> out, std::vector<ReductionEvent>* sink,
             const std::string* stage_name)
    : in_(std::move(in)), out_(std::move(out)), sink_(sink), stage_name_(stage_name) {}

bool Ports::all_inputs_exhausted() const noexcept {
    return std::all_of(in_.begin(), in_.end(), [](const Channel* c) { return c->exhausted(); });
}

void Ports::close_outputs() const noexcept {
    for (Channel* c : out_) c->close();
}

void Ports::record(std::size_t step, std::size_t machine, std::optional<std::size_t> row, double value,
                   bool emitted) const {
    if (sink_ == nullptr) return;
    sink_->push_back(ReductionEvent{*stage_name_, step, machine, row, value, emitted});
}

Stage::Stage(std::string name, StageKind kind, bool stateful)
    : name_(std::move(name)), kind_(kind), stateful_(stateful) {}

// ----------------------------------------------------------------------------
// Graph
// ----------------------------------------------------------------------------

ChannelId PipelineGraph::add_channel(std::string name, ElementKind kind) {
    if (find_channel(name)) throw Error(ErrorCode::BadGraph, "duplicate channel name '" + name + "'");
    channels_.push_back(std::make_unique<Channel>(std::move(name), kind));
    return channels_.size() - 1;
}

void PipelineGraph::add_stage(std::unique_ptr<Stage> stage, std::vector<ChannelId> inputs,
                              std::vector<ChannelId> outputs) {
    for (ChannelId id : inputs)
        if (id >= channels_.size()) throw Error(ErrorCode::BadGraph, "unknown input channel for " + stage->name());
    for (ChannelId id : outputs)
        if (id >= channels_.size()) throw Error(ErrorCode::BadGraph, "unknown output channel for " + stage->name());
    nodes_.push_back(Node{std::move(stage), std::move(inputs), std::move(outputs)});
}

std::size_t PipelineGraph::count(StageKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.stage->kind() == kind; }));
}

std::size_t PipelineGraph::count(std::string_view prefix) const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) {
        return std::string_view(n.stage->name()).starts_with(prefix);
    }));
}

std::optional<ChannelId> PipelineGraph::find_channel(std::string_view name) const {
    for (std::size_t k = 0; k < channels_.size(); ++k)
        if (channels_[k]->name() == name) return k;
    return std::nullopt;
}

void PipelineGraph::validate() const {
    std::vector<std::size_t> producers(channels_.size(), 0), consumers(channels_.size(), 0);
    for (const auto& n : nodes_) {
        for (ChannelId id : n.outputs) ++producers[id];
        for (ChannelId id : n.inputs) ++consumers[id];
    }
    for (std::size_t k = 0; k < channels_.size(); ++k) {
        if (producers[k] != 1)
            throw Error(ErrorCode::BadGraph, "channel '" + channels_[k]->name() + "' has " +
                                                 std::to_string(producers[k]) + " producers");
        if (consumers[k] > 1)
            throw Error(ErrorCode::BadGraph, "channel '" + channels_[k]->name() + "' has " +
                                                 std::to_string(consumers[k]) + " consumers");
    }
    topological_order();
}

std::vector<std::size_t> PipelineGraph::topological_order() const {
    std::vector<std::optional<std::size_t>> producer(channels_.size());
    for (std::size_t s = 0; s < nodes_.size(); ++s)
        for (ChannelId id : nodes_[s].outputs) producer[id] = s;

    // Kahn's algorithm; among ready stages the lowest insertion index goes first.
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    std::vector<std::vector<std::size_t>> successors(nodes_.size());
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        for (ChannelId id : nodes_[s].inputs) {
            if (!producer[id])
                throw Error(ErrorCode::BadGraph, "channel '" + channels_[id]->name() + "' has no producer");
            successors[*producer[id]].push_back(s);
            ++indegree[s];
        }
    }
    std::vector<std::size_t> order;
    std::vector<bool> placed(nodes_.size(), false);
    while (order.size() < nodes_.size()) {
        std::size_t pick = nodes_.size();
        for (std::size_t s = 0; s < nodes_.size(); ++s) {
            if (!placed[s] && indegree[s] == 0) {
                pick = s;
                break;
            }
        }
        if (pick == nodes_.size()) throw Error(ErrorCode::BadGraph, "stage graph contains a cycle");
        placed[pick] = true;
        order.push_back(pick);
        for (std::size_t t : successors[pick]) --indegree[t];
    }
    return order;
}

std::vector<ChannelId> PipelineGraph::outputs() const {
    std::vector<bool> consumed(channels_.size(), false);
    for (const auto& n : nodes_)
        for (ChannelId id : n.inputs) consumed[id] = true;
    std::vector<ChannelId> out;
    for (std::size_t k = 0; k < channels_.size(); ++k)
        if (!consumed[k]) out.push_back(k);
    return out;
}

// ----------------------------------------------------------------------------
// Execution
// ----------------------------------------------------------------------------

struct Runner {
    static RunResult go(PipelineGraph& g, const RunOptions& options) {
        g.validate();
        if (options.budget == 0) throw Error(ErrorCode::InvalidArgument, "run budget must be at least 1");
        for (const auto& c : g.channels_)
            if (c->produced() != 0 || c->closed())
                throw Error(ErrorCode::BadGraph, "graph has already been run");

        const auto order = g.topological_order();
        RunResult result;
        Trace& trace = result.trace;
        trace.summary = g.summary;
        for (const auto& n : g.nodes_) trace.totals.push_back(StageCount{n.stage->name(), n.stage->kind(), 0, 0});

        std::vector<Ports> ports;
        ports.reserve(g.nodes_.size());
        for (const auto& n : g.nodes_) {
            std::vector<Channel*> in, out;
            for (ChannelId id : n.inputs) in.push_back(g.channels_[id].get());
            for (ChannelId id : n.outputs) out.push_back(g.channels_[id].get());
            ports.emplace_back(std::move(in), std::move(out), options.record_events ? &trace.reductions : nullptr,
                               &n.stage->name());
        }

        std::size_t round = 0;
        for (;;) {
            bool all_finished = true;
            bool progressed = false;
            for (std::size_t s : order) {
                Stage& st = *g.nodes_[s].stage;
                if (st.finished()) continue;
                FireResult r;
                try {
                    r = st.fire(ports[s], options.budget);
                } catch (const Error& e) {
                    throw Error(e.code(), "stage " + st.name() + " in round " + std::to_string(round) + ": " +
                                              e.detail());
                }
                if (r.progressed || r.consumed > 0 || r.produced > 0) progressed = true;
                trace.totals[s].consumed += r.consumed;
                trace.totals[s].produced += r.produced;
                if (options.record_events && (r.consumed > 0 || r.produced > 0))
                    trace.events.push_back(StageEvent{round, st.name(), r.consumed, r.produced});
                if (!st.finished()) all_finished = false;
            }
            ++round;
            if (all_finished) break;
            if (!progressed) throw Error(ErrorCode::Deadlock, deadlock_report(g));
        }
        trace.rounds = round;

        const auto outs = g.outputs();
        std::vector<bool> is_output(g.channels_.size(), false);
        for (ChannelId id : outs) is_output[id] = true;
        for (std::size_t k = 0; k < g.channels_.size(); ++k) {
            Channel& c = *g.channels_[k];
            if (is_output[k]) continue;
            if (!c.empty() || c.produced() != c.consumed())
                throw Error(ErrorCode::BadGraph, "channel '" + c.name() + "' finished with " +
                                                     std::to_string(c.size()) + " unconsumed items");
        }
        for (ChannelId id : outs) {
            Channel& c = *g.channels_[id];
            RunOutput o{c.name(), {}};
            while (!c.empty()) o.tokens.push_back(c.pop());
            result.outputs.push_back(std::move(o));
        }
        return result;
    }

    static std::string deadlock_report(const PipelineGraph& g) {
        std::ostringstream os;
        os << "no stage can make progress; waiting:";
        for (const auto& n : g.nodes_) {
            if (n.stage->finished()) continue;
            os << ' ' << n.stage->name() << " [";
            bool first = true;
            for (ChannelId id : n.inputs) {
                const Channel& c = *g.channels_[id];
                os << (first ? "" : ", ") << c.name() << ':' << c.size() << (c.closed() ? " closed" : " open");
                first = false;
            }
            os << ']';
        }
        return os.str();
    }
};

RunResult run(PipelineGraph& graph, const RunOptions& options) { return Runner::go(graph, options); }

const std::vector<Token>& RunResult::output(std::string_view channel) const {
    for (const auto& o : outputs)
        if (o.channel == channel) return o.tokens;
    throw Error(ErrorCode::InvalidArgument, "no graph output named '" + std::string(channel) + "'");
}

// ----------------------------------------------------------------------------
// Trace export and stats
// ----------------------------------------------------------------------------

std::string Trace::events_csv() const {
    std::ostringstream os;
    os << "round,stage,consumed,produced\n";
    for (const auto& e : events) os << e.round << ',' << e.stage << ',' << e.consumed << ',' << e.produced << '\n';
    return os.str();
}

std::string Trace::reductions_csv() const {
    std::ostringstream os;
    os << "stage,step,machine,row,value,emitted\n";
    for (const auto& e : reductions) {
        os << e.stage << ',' << e.step << ',' << e.machine << ',';
        if (e.row) os << *e.row;
        os << ',' << format_number(e.value) << ',' << (e.emitted ? 1 : 0) << '\n';
    }
    return os.str();
}

Stats stats(const Trace& trace) {
    Stats s;
    s.design = trace.summary.design;
    s.machines = trace.summary.machines;
    s.stream_length = trace.summary.stream_length;
    s.nnz = trace.summary.nnz;
    const std::size_t slots = s.machines * s.stream_length;
    s.padded_slots = slots - std::min(slots, s.nnz);
    if (s.nnz == 0 || slots == 0) {
        s.utilization = 0.0;
        s.warnings.push_back("matrix has no nonzeros; utilization reported as 0");
    } else {
        s.utilization = static_cast<double>(s.nnz) / static_cast<double>(slots);
    }
    s.per_stage = trace.totals;
    return s;
}

std::string Stats::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["design"] = design;
    j["machines"] = machines;
    j["stream_length"] = stream_length;
    j["nnz"] = nnz;
    j["padded_slots"] = padded_slots;
    j["utilization"] = utilization;
    auto stages = nlohmann::ordered_json::array();
    for (const auto& c : per_stage)
        stages.push_back({{"stage", c.stage}, {"kind", to_string(c.kind)}, {"consumed", c.consumed},
                          {"produced", c.produced}});
    j["stages"] = std::move(stages);
    j["warnings"] = warnings;
    return j.dump(indent);
}

}  // namespace sparsespace
