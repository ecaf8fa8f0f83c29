#include "sparsespace/transform.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

#include "sparsespace/error.hpp"

namespace sparsespace {

std::string_view to_string(Dim d) noexcept {
    switch (d) {
        case Dim::Rows: return "rows";
        case Dim::Columns: return "columns";
        case Dim::Blocks: return "blocks";
    }
    return "?";
}

namespace {

// Jobs produced by packing dimension d are lines along the other dimension.
Dim line_dim(Dim packed) { return packed == Dim::Columns ? Dim::Rows : Dim::Columns; }

PackStep default_pack(Dim dim) {
    PackStep p;
    p.dim = dim;
    p.index_name = dim == Dim::Columns ? "col_idx" : "row_idx";
    p.length_name = dim == Dim::Columns ? "row_len" : "col_len";
    return p;
}

}  // namespace

ValidationReport validate_spec(const RepresentationSpec& spec) {
    ValidationReport report;
    auto& v = report.violations;
    if (spec.steps.empty()) {
        v.push_back("spec has no steps");
        return report;
    }

    std::vector<std::size_t> packs, blocks, schedules;
    for (std::size_t s = 0; s < spec.steps.size(); ++s) {
        std::visit(
            [&](const auto& step) {
                using T = std::decay_t<decltype(step)>;
                if constexpr (std::is_same_v<T, PackStep>) packs.push_back(s);
                if constexpr (std::is_same_v<T, BlockStep>) blocks.push_back(s);
                if constexpr (std::is_same_v<T, ScheduleStep>) schedules.push_back(s);
            },
            spec.steps[s]);
    }

    if (schedules.size() != 1) {
        v.push_back("exactly one Schedule step is required, found " + std::to_string(schedules.size()));
    }
    if (!std::holds_alternative<ScheduleStep>(spec.steps.back())) {
        v.push_back("the last step must be a Schedule (job scheduling)");
    }
    if (packs.size() != 1) v.push_back("exactly one Pack step is required, found " + std::to_string(packs.size()));
    if (blocks.size() > 1) v.push_back("at most one Block step is supported, found " + std::to_string(blocks.size()));
    if (packs.size() == 1 && !blocks.empty() && blocks.front() < packs.front()) {
        v.push_back("Pack must precede Block");
    }

    const PackStep* pack_step = packs.size() == 1 ? &std::get<PackStep>(spec.steps[packs.front()]) : nullptr;
    const BlockStep* block_step = blocks.size() == 1 ? &std::get<BlockStep>(spec.steps[blocks.front()]) : nullptr;

    if (pack_step && pack_step->dim == Dim::Blocks) v.push_back("Pack dimension must be Rows or Columns");
    if (block_step) {
        if (block_step->factor < 1) v.push_back("Block factor must be at least 1");
        if (pack_step && block_step->dim != pack_step->dim) {
            v.push_back("Block must split the packed dimension (" + std::string(to_string(pack_step->dim)) + ")");
        }
    }
    for (std::size_t s : schedules) {
        const auto& sched = std::get<ScheduleStep>(spec.steps[s]);
        if (sched.machines < 1) v.push_back("Schedule needs at least one machine");
        if (pack_step && pack_step->dim != Dim::Blocks) {
            const Dim expected = block_step ? Dim::Blocks : line_dim(pack_step->dim);
            if (sched.dim != expected) {
                v.push_back("Schedule dimension must be " + std::string(to_string(expected)) + ", got " +
                            std::string(to_string(sched.dim)));
            }
        }
    }
    return report;
}

RepresentationSpec cisr_spec(std::size_t machines) {
    ScheduleStep sched;
    sched.dim = Dim::Rows;
    sched.machines = machines;
    return {"CISR", {default_pack(Dim::Columns), sched}};
}

RepresentationSpec blocked_spec(std::size_t block_factor, std::size_t machines) {
    PackStep p = default_pack(Dim::Columns);
    p.length_name.reset();
    BlockStep b;
    b.dim = Dim::Columns;
    b.factor = block_factor;
    ScheduleStep sched;
    sched.dim = Dim::Blocks;
    sched.machines = machines;
    return {"blocked", {p, b, sched}};
}

std::vector<std::size_t> PackedMatrix::lengths() const {
    std::vector<std::size_t> out;
    out.reserve(lines.size());
    for (const auto& l : lines) out.push_back(l.slots.size());
    return out;
}

PackedMatrix pack(const DenseMatrix& a, Dim dim) {
    if (dim == Dim::Blocks) throw Error(ErrorCode::InvalidArgument, "cannot pack along Blocks");
    PackedMatrix p{dim, a.rows(), a.cols(), {}};
    if (dim == Dim::Columns) {
        p.lines.resize(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            p.lines[i].major = i;
            for (std::size_t j = 0; j < a.cols(); ++j) {
                if (double v = a(i, j); v != 0.0) p.lines[i].slots.push_back({v, j, Coord{i, j}});
            }
        }
    } else {
        p.lines.resize(a.cols());
        for (std::size_t j = 0; j < a.cols(); ++j) {
            p.lines[j].major = j;
            for (std::size_t i = 0; i < a.rows(); ++i) {
                if (double v = a(i, j); v != 0.0) p.lines[j].slots.push_back({v, i, Coord{i, j}});
            }
        }
    }
    return p;
}

std::size_t BlockedMatrix::padded_slots() const {
    std::size_t pads = 0;
    for (const auto& b : blocks) {
        pads += static_cast<std::size_t>(std::count_if(b.slots.begin(), b.slots.end(),
                                                       [](const Slot& s) { return !s.origin; }));
    }
    return pads;
}

BlockedMatrix block(const PackedMatrix& p, std::size_t factor) {
    if (factor < 1) throw Error(ErrorCode::InvalidArgument, "block factor must be at least 1");
    BlockedMatrix b;
    b.dim = p.dim;
    b.n_rows = p.n_rows;
    b.n_cols = p.n_cols;
    b.factor = factor;
    b.row_blocks.reserve(p.lines.size());
    for (const auto& line : p.lines) {
        const std::size_t n = line.slots.size();
        const std::size_t count = (n + factor - 1) / factor;
        b.row_blocks.push_back(count);
        for (std::size_t k = 0; k < count; ++k) {
            Job blk{line.major, {}};
            blk.slots.reserve(factor);
            for (std::size_t s = k * factor; s < (k + 1) * factor; ++s) {
                blk.slots.push_back(s < n ? line.slots[s] : Slot{});
            }
            b.blocks.push_back(std::move(blk));
        }
    }
    return b;
}

Dim EncodedMatrix::packed_dim() const {
    for (const auto& step : spec.steps) {
        if (const auto* p = std::get_if<PackStep>(&step)) return p->dim;
    }
    return Dim::Columns;
}

std::size_t EncodedMatrix::major_extent() const { return packed_dim() == Dim::Columns ? n_rows : n_cols; }

std::size_t EncodedMatrix::nnz() const {
    std::size_t count = 0;
    for (const auto& stream : provenance) {
        count += static_cast<std::size_t>(std::count_if(stream.begin(), stream.end(),
                                                        [](const SlotOrigin& o) { return o.has_value(); }));
    }
    return count;
}

std::size_t EncodedMatrix::padded_slots() const { return machines * stream_length - nnz(); }

std::vector<std::size_t> asap_assignment(std::span<const std::size_t> job_lengths, std::size_t machines) {
    if (machines == 0) throw Error(ErrorCode::ZeroMachines, "cannot schedule onto zero machines");
    using Load = std::pair<std::size_t, std::size_t>;  // (accumulated slots, machine)
    std::priority_queue<Load, std::vector<Load>, std::greater<>> ready;
    for (std::size_t m = 0; m < machines; ++m) ready.push({0, m});

    std::vector<std::size_t> assignment;
    assignment.reserve(job_lengths.size());
    for (std::size_t len : job_lengths) {
        auto [load, m] = ready.top();
        ready.pop();
        assignment.push_back(m);
        ready.push({load + len, m});
    }
    return assignment;
}

namespace {

struct MachineStreams {
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::size_t>> col_idx;
    std::vector<std::vector<SlotOrigin>> provenance;

    explicit MachineStreams(std::size_t m) : values(m), col_idx(m), provenance(m) {}

    void append(std::size_t m, const Slot& s) {
        values[m].push_back(s.value);
        col_idx[m].push_back(s.index);
        provenance[m].push_back(s.origin);
    }
    void pad(std::size_t m, std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) append(m, Slot{});
    }
};

}  // namespace

EncodedMatrix schedule_asap(const PackedMatrix& p, std::size_t machines) {
    const auto lengths = p.lengths();
    const auto assignment = asap_assignment(lengths, machines);

    MachineStreams streams(machines);
    RowLengths row_len{std::vector<std::vector<std::size_t>>(machines)};
    for (std::size_t job = 0; job < p.lines.size(); ++job) {
        const std::size_t m = assignment[job];
        for (const auto& s : p.lines[job].slots) streams.append(m, s);
        row_len.per_machine[m].push_back(lengths[job]);
    }

    std::size_t stream_length = 0;
    for (const auto& v : streams.values) stream_length = std::max(stream_length, v.size());

    for (std::size_t m = 0; m < machines; ++m) {
        const std::size_t pads = stream_length - streams.values[m].size();
        streams.pad(m, pads);
        if (row_len.per_machine[m].empty()) {
            row_len.per_machine[m].push_back(stream_length);
        } else {
            row_len.per_machine[m].back() += pads;
        }
    }

    EncodedMatrix e;
    e.machines = machines;
    e.stream_length = stream_length;
    e.values = std::move(streams.values);
    e.col_idx = std::move(streams.col_idx);
    e.provenance = std::move(streams.provenance);
    e.structure = std::move(row_len);
    e.n_rows = p.n_rows;
    e.n_cols = p.n_cols;
    ScheduleStep sched;
    sched.dim = line_dim(p.dim);
    sched.machines = machines;
    e.spec = {"", {default_pack(p.dim), sched}};
    return e;
}

EncodedMatrix schedule_asap(const BlockedMatrix& b, std::size_t machines) {
    const std::vector<std::size_t> lengths(b.blocks.size(), b.factor);
    const auto assignment = asap_assignment(lengths, machines);

    MachineStreams streams(machines);
    std::vector<std::size_t> per_machine(machines, 0);
    for (std::size_t job = 0; job < b.blocks.size(); ++job) {
        const std::size_t m = assignment[job];
        for (const auto& s : b.blocks[job].slots) streams.append(m, s);
        ++per_machine[m];
    }
    const std::size_t steps = *std::max_element(per_machine.begin(), per_machine.end());
    for (std::size_t m = 0; m < machines; ++m) streams.pad(m, (steps - per_machine[m]) * b.factor);

    EncodedMatrix e;
    e.machines = machines;
    e.stream_length = steps * b.factor;
    e.values = std::move(streams.values);
    e.col_idx = std::move(streams.col_idx);
    e.provenance = std::move(streams.provenance);
    e.structure = RowBlocks{b.row_blocks, b.factor};
    e.n_rows = b.n_rows;
    e.n_cols = b.n_cols;
    PackStep p = default_pack(b.dim);
    p.length_name.reset();
    BlockStep blk;
    blk.dim = b.dim;
    blk.factor = b.factor;
    ScheduleStep sched;
    sched.dim = Dim::Blocks;
    sched.machines = machines;
    e.spec = {"", {p, blk, sched}};
    return e;
}

EncodedMatrix encode(const DenseMatrix& a, const RepresentationSpec& spec) {
    const auto report = validate_spec(spec);
    if (!report.ok()) {
        std::string msg = "invalid representation '" + spec.name + "':";
        for (const auto& v : report.violations) msg += " " + v + ";";
        throw Error(ErrorCode::InvalidSpec, msg);
    }

    const PackStep* pack_step = nullptr;
    const BlockStep* block_step = nullptr;
    const ScheduleStep* sched = nullptr;
    for (const auto& step : spec.steps) {
        if (const auto* p = std::get_if<PackStep>(&step)) pack_step = p;
        if (const auto* b = std::get_if<BlockStep>(&step)) block_step = b;
        if (const auto* s = std::get_if<ScheduleStep>(&step)) sched = s;
    }

    const PackedMatrix packed = pack(a, pack_step->dim);
    EncodedMatrix e = block_step ? schedule_asap(block(packed, block_step->factor), sched->machines)
                                 : schedule_asap(packed, sched->machines);
    e.spec = spec;
    return e;
}

}  // namespace sparsespace
