#include "stages.hpp"

#include <algorithm>

#include "sparsespace/error.hpp"

namespace sparsespace::stages {

namespace {

bool all_ready(const Ports& io, std::size_t first, std::size_t count) {
    for (std::size_t k = first; k < first + count; ++k)
        if (io.in(k).empty()) return false;
    return true;
}

// True when lanes [first, first+count) have all ended together; throws if
// some ended while others still carry items.
bool lanes_ended(const Ports& io, std::size_t first, std::size_t count, const std::string& stage) {
    std::size_t ended = 0;
    for (std::size_t k = first; k < first + count; ++k)
        if (io.in(k).exhausted()) ++ended;
    if (ended == 0) return false;
    if (ended == count) return true;
    for (std::size_t k = first; k < first + count; ++k) {
        if (!io.in(k).empty())
            throw Error(ErrorCode::BadGraph, stage + " received lanes of different lengths ('" + io.in(k).name() +
                                                 "' still has items)");
    }
    return false;
}

}  // namespace

// ----------------------------------------------------------------------------

LaneLoader::LaneLoader(std::string name, std::vector<std::vector<Token>> lanes)
    : Stage(std::move(name), StageKind::Loader, false), lanes_(std::move(lanes)), cursor_(lanes_.size(), 0) {}

FireResult LaneLoader::fire(const Ports& io, std::size_t budget) {
    if (io.outputs() != lanes_.size()) throw Error(ErrorCode::BadGraph, name() + " needs one output per lane");
    FireResult r;
    bool remaining = false;
    for (std::size_t k = 0; k < lanes_.size(); ++k) {
        const std::size_t n = std::min(budget, lanes_[k].size() - cursor_[k]);
        for (std::size_t t = 0; t < n; ++t) io.out(k).push(lanes_[k][cursor_[k]++]);
        r.produced += n;
        if (cursor_[k] < lanes_[k].size()) remaining = true;
    }
    if (!remaining) {
        finish(io);
        r.progressed = true;
    }
    return r;
}

// ----------------------------------------------------------------------------

XGatherLoader::XGatherLoader(std::string name, std::vector<double> x)
    : Stage(std::move(name), StageKind::Loader, false), x_(std::move(x)) {}

FireResult XGatherLoader::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    for (std::size_t k = 0; k < io.inputs(); ++k) {
        for (std::size_t t = 0; t < budget && !io.in(k).empty(); ++t) {
            const std::size_t j = std::get<std::size_t>(io.in(k).pop());
            if (j >= x_.size())
                throw Error(ErrorCode::OutOfBounds, "column index " + std::to_string(j) + " outside x of length " +
                                                        std::to_string(x_.size()));
            io.out(k).push(x_[j]);
            ++r.consumed;
            ++r.produced;
        }
    }
    if (io.all_inputs_exhausted()) {
        finish(io);
        r.progressed = true;
    }
    return r;
}

// ----------------------------------------------------------------------------

RowDecoder::RowDecoder(std::string name, std::size_t machines, std::size_t n_rows)
    : Stage(std::move(name), StageKind::Decoder, true), replay_(machines, n_rows) {}

FireResult RowDecoder::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    std::vector<bool> exhausted(io.inputs());
    for (std::size_t t = 0; t < budget; ++t) {
        for (std::size_t k = 0; k < io.inputs(); ++k) exhausted[k] = io.in(k).exhausted();
        const auto machine = replay_.next_machine(exhausted);
        if (!machine) {
            if (replay_.labelled() < replay_.n_rows())
                throw Error(ErrorCode::StructureExhausted,
                            "row_len entries ran out after " + std::to_string(replay_.labelled()) + " of " +
                                std::to_string(replay_.n_rows()) + " rows");
            finish(io);
            r.progressed = true;
            break;
        }
        // The replay must follow the scheduler's order, so it waits for the
        // machine it needs rather than reading ahead on another.
        if (io.in(*machine).empty()) break;
        const std::size_t length = std::get<std::size_t>(io.in(*machine).pop());
        ++r.consumed;
        const std::size_t row = replay_.take(*machine, length);
        for (std::size_t s = 0; s < length; ++s) io.out(*machine).push(row);
        r.produced += length;
    }
    return r;
}

// ----------------------------------------------------------------------------

RowMultiplier::RowMultiplier(std::string name) : Stage(std::move(name), StageKind::Compute, false) {}

FireResult RowMultiplier::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    for (std::size_t t = 0; t < budget && all_ready(io, 0, 3); ++t) {
        const double v = std::get<double>(io.in(0).pop());
        const double xv = std::get<double>(io.in(1).pop());
        const std::size_t row = std::get<std::size_t>(io.in(2).pop());
        io.out(0).push(PartialSum{row, v * xv});
        r.consumed += 3;
        ++r.produced;
    }
    if (lanes_ended(io, 0, 3, name())) {
        finish(io);
        r.progressed = true;
    }
    return r;
}

Multiplier::Multiplier(std::string name) : Stage(std::move(name), StageKind::Compute, false) {}

FireResult Multiplier::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    for (std::size_t t = 0; t < budget && all_ready(io, 0, 2); ++t) {
        const double v = std::get<double>(io.in(0).pop());
        const double xv = std::get<double>(io.in(1).pop());
        io.out(0).push(v * xv);
        r.consumed += 2;
        ++r.produced;
    }
    if (lanes_ended(io, 0, 2, name())) {
        finish(io);
        r.progressed = true;
    }
    return r;
}

// ----------------------------------------------------------------------------

FusedAccumulatorStage::FusedAccumulatorStage(std::string name, std::vector<std::size_t> stream_ids,
                                             std::size_t synthetic_from)
    : Stage(std::move(name), StageKind::Reducer, true),
      unit_(stream_ids.size(), synthetic_from),
      stream_ids_(std::move(stream_ids)),
      last_row_(stream_ids_.size()) {}

FireResult FusedAccumulatorStage::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    const std::size_t n = io.inputs();
    std::vector<std::optional<PartialSum>> turn(n);
    std::vector<PartialSum> out;
    for (std::size_t t = 0; t < budget; ++t) {
        bool any = false;
        bool waiting = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (io.in(k).empty() && !io.in(k).closed()) waiting = true;
            if (!io.in(k).empty()) any = true;
        }
        if (waiting) break;
        if (!any) {
            out.clear();
            unit_.flush(out);
            // Every stream that saw an item still holds one register.
            std::size_t e = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (!last_row_[k]) continue;
                const PartialSum& ps = out.at(e++);
                io.record(step_, stream_ids_[k], ps.row, ps.value, true);
                io.out(0).push(ps);
                ++r.produced;
            }
            finish(io);
            r.progressed = true;
            break;
        }
        for (std::size_t k = 0; k < n; ++k) {
            turn[k] = std::nullopt;
            if (!io.in(k).empty()) {
                turn[k] = std::get<PartialSum>(io.in(k).pop());
                ++r.consumed;
            }
        }
        out.clear();
        unit_.step(turn, out);
        // A stream emits in this turn exactly when its row changed; emissions
        // come out in stream order.
        std::size_t e = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!turn[k]) continue;
            if (last_row_[k] && *last_row_[k] != turn[k]->row) {
                const PartialSum& ps = out.at(e++);
                io.record(step_, stream_ids_[k], ps.row, ps.value, true);
                io.out(0).push(ps);
                ++r.produced;
            }
            io.record(step_, stream_ids_[k], turn[k]->row, turn[k]->value, false);
            last_row_[k] = turn[k]->row;
        }
        ++step_;
    }
    return r;
}

// ----------------------------------------------------------------------------

AdderTreeStage::AdderTreeStage(std::string name, std::size_t machine, std::size_t levels)
    : Stage(std::move(name), StageKind::Reducer, false), machine_(machine), levels_(levels) {}

FireResult AdderTreeStage::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    const std::size_t n = io.inputs();
    std::vector<double> lanes(n);
    for (std::size_t t = 0; t < budget && all_ready(io, 0, n); ++t) {
        for (std::size_t k = 0; k < n; ++k) lanes[k] = std::get<double>(io.in(k).pop());
        const double sum = tree_reduce(lanes, levels_);
        io.record(step_++, machine_, std::nullopt, sum, true);
        io.out(0).push(sum);
        r.consumed += n;
        ++r.produced;
    }
    if (lanes_ended(io, 0, n, name())) {
        finish(io);
        r.progressed = true;
    }
    return r;
}

// ----------------------------------------------------------------------------

BlockDecoder::BlockDecoder(std::string name, std::size_t machines, std::size_t total_blocks)
    : Stage(std::move(name), StageKind::Decoder, true), replay_(machines, total_blocks) {}

FireResult BlockDecoder::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    Channel& counts = io.in(0);
    for (std::size_t t = 0; t < budget; ++t) {
        if (replay_.done()) {
            // Remaining counts must describe no further blocks.
            while (!counts.empty()) {
                replay_.push_count(std::get<std::size_t>(counts.pop()));
                ++r.consumed;
            }
            if (!counts.exhausted()) break;
            replay_.finish();
            finish(io);
            r.progressed = true;
            break;
        }
        if (replay_.needs_count()) {
            if (!counts.empty()) {
                replay_.push_count(std::get<std::size_t>(counts.pop()));
                ++r.consumed;
                continue;
            }
            if (!counts.exhausted()) break;
            replay_.close_counts();
            r.progressed = true;
        }
        if (auto label = replay_.next()) {
            io.out(0).push(*label);
            ++r.produced;
        }
    }
    return r;
}

// ----------------------------------------------------------------------------

PairAdder::PairAdder(std::string name, std::size_t machines)
    : Stage(std::move(name), StageKind::Reducer, false), machines_(machines) {}

FireResult PairAdder::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    const std::size_t m = machines_;
    Channel& labels = io.in(m);
    for (std::size_t t = 0; t < budget && all_ready(io, 0, m) && labels.size() >= m; ++t) {
        std::optional<PartialSum> current;
        for (std::size_t i = 0; i < m; ++i) {
            const auto label = std::get<BlockLabel>(labels.pop());
            const double sum = std::get<double>(io.in(i).pop());
            r.consumed += 2;
            if (label.machine != i || label.step != step_)
                throw Error(ErrorCode::BadGraph, "block label " + std::to_string(label.block) +
                                                     " arrived out of step with the block sums");
            io.record(step_, i, label.row, sum, false);
            if (current && label.same_row_as_previous_machine) {
                current->value += sum;
                continue;
            }
            if (current) {
                const PartialSum done{current->row, current->value + 0.0};
                io.record(step_, i - 1, done.row, done.value, true);
                io.out(0).push(done);
                ++r.produced;
            }
            current = PartialSum{label.row, sum};
        }
        io.record(step_, m - 1, current->row, current->value, true);
        io.out(0).push(*current);
        ++r.produced;
        ++step_;
    }
    if (io.all_inputs_exhausted()) {
        finish(io);
        r.progressed = true;
    }
    return r;
}

// ----------------------------------------------------------------------------

LinearArrayStage::LinearArrayStage(std::string name, std::size_t cells)
    : Stage(std::move(name), StageKind::Reducer, true), array_(cells) {}

FireResult LinearArrayStage::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    std::vector<PartialSum> out;
    for (std::size_t t = 0; t < budget && !io.in(0).empty(); ++t) {
        const auto record = std::get<PartialSum>(io.in(0).pop());
        ++r.consumed;
        io.record(step_, 0, record.row, record.value, false);
        out.clear();
        array_.push(record, out);
        for (const auto& ps : out) {
            io.record(step_, 0, ps.row, ps.value, true);
            io.out(0).push(ps);
            ++r.produced;
        }
        ++step_;
    }
    if (io.in(0).exhausted()) {
        out.clear();
        array_.flush(out);
        for (const auto& ps : out) {
            io.record(step_, 0, ps.row, ps.value, true);
            io.out(0).push(ps);
            ++r.produced;
        }
        finish(io);
        r.progressed = true;
    }
    return r;
}

// ----------------------------------------------------------------------------

YUnloader::YUnloader(std::string name, std::size_t n_rows)
    : Stage(std::move(name), StageKind::Unloader, true), y_(n_rows, 0.0) {}

FireResult YUnloader::fire(const Ports& io, std::size_t budget) {
    FireResult r;
    for (std::size_t k = 0; k < io.inputs(); ++k) {
        for (std::size_t t = 0; t < budget && !io.in(k).empty(); ++t) {
            const auto ps = std::get<PartialSum>(io.in(k).pop());
            ++r.consumed;
            if (ps.row < y_.size())
                y_[ps.row] += ps.value;
            else
                ++discarded_;
        }
    }
    if (io.all_inputs_exhausted()) {
        for (double v : y_) io.out(0).push(v);
        r.produced += y_.size();
        finish(io);
        r.progressed = true;
    }
    return r;
}

}  // namespace sparsespace::stages
