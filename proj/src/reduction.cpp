#include "sparsespace/reduction.hpp"

#include <algorithm>
#include <string>

#include "sparsespace/error.hpp"

namespace sparsespace {

bool check_continuous(std::span<const std::size_t> rows) {
    std::set<std::size_t> closed;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k] == rows[k - 1]) continue;
        closed.insert(rows[k - 1]);
        if (closed.contains(rows[k])) return false;
    }
    return true;
}

bool check_distinct(const std::vector<std::vector<std::size_t>>& streams, std::size_t synthetic_from) {
    if (streams.empty()) return true;
    const std::size_t len = streams.front().size();
    for (const auto& s : streams) {
        if (s.size() != len) throw Error(ErrorCode::DimensionMismatch, "step-aligned streams must be equally long");
    }
    std::vector<std::size_t> live;
    for (std::size_t t = 0; t < len; ++t) {
        live.clear();
        for (const auto& s : streams) {
            if (s[t] < synthetic_from) live.push_back(s[t]);
        }
        std::sort(live.begin(), live.end());
        if (std::adjacent_find(live.begin(), live.end()) != live.end()) return false;
    }
    return true;
}

ReductionProps analyze_reduction(const std::vector<std::vector<std::size_t>>& streams, std::size_t synthetic_from) {
    ReductionProps props;
    props.continuous_per_machine =
        std::all_of(streams.begin(), streams.end(), [](const auto& s) { return check_continuous(s); });
    props.distinct_across_machines = check_distinct(streams, synthetic_from);
    for (const auto& s : streams) {
        std::size_t run = 0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            run = (k > 0 && s[k] == s[k - 1]) ? run + 1 : 1;
            if (s[k] < synthetic_from) props.max_run_per_target = std::max(props.max_run_per_target.value_or(0), run);
        }
    }
    return props;
}

// ----------------------------------------------------------------------------

std::optional<PartialSum> RunAccumulator::push(PartialSum item) {
    if (current_ && current_->row == item.row) {
        current_->value += item.value;
        return std::nullopt;
    }
    auto done = current_;
    current_ = item;
    return done;
}

std::optional<PartialSum> RunAccumulator::flush() {
    auto done = current_;
    current_.reset();
    return done;
}

std::vector<PartialSum> isolate_reduction(std::span<const PartialSum> items) {
    std::vector<PartialSum> out;
    RunAccumulator acc;
    for (const auto& item : items) {
        if (auto p = acc.push(item)) out.push_back(*p);
    }
    if (auto p = acc.flush()) out.push_back(*p);
    return out;
}

std::vector<std::vector<PartialSum>> isolate_reduction(const std::vector<std::vector<PartialSum>>& per_machine) {
    std::vector<std::vector<PartialSum>> out;
    out.reserve(per_machine.size());
    for (const auto& s : per_machine) out.push_back(isolate_reduction(s));
    return out;
}

// ----------------------------------------------------------------------------

std::vector<double> combine_same_target(const std::vector<std::vector<double>>& steps) {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& step : steps) {
        double sum = 0.0;
        for (double v : step) sum += v;
        out.push_back(sum);
    }
    return out;
}

std::vector<double> combine_same_target(const std::vector<std::vector<double>>& steps,
                                        const std::vector<std::vector<std::size_t>>& step_rows) {
    if (steps.size() != step_rows.size()) {
        throw Error(ErrorCode::DimensionMismatch, "row trace must cover every step");
    }
    for (std::size_t t = 0; t < steps.size(); ++t) {
        const auto& rows = step_rows[t];
        if (rows.size() != steps[t].size()) {
            throw Error(ErrorCode::DimensionMismatch, "row trace step " + std::to_string(t) + " has the wrong width");
        }
        if (std::adjacent_find(rows.begin(), rows.end(), std::not_equal_to<>()) != rows.end()) {
            throw Error(ErrorCode::TargetMismatch, "machines target different rows at step " + std::to_string(t));
        }
    }
    return combine_same_target(steps);
}

void combine_maybe_different_step(std::span<const PartialSum> step, std::vector<PartialSum>& out) {
    if (step.empty()) return;
    double sum = 0.0;
    std::size_t current = step.front().row;
    for (const auto& item : step) {
        if (current == item.row) {
            sum += item.value;
        } else {
            out.push_back({current, sum});
            sum = item.value;
        }
        current = item.row;
    }
    out.push_back({current, sum});
}

std::vector<PartialSum> combine_maybe_different(const std::vector<std::vector<PartialSum>>& steps) {
    std::vector<PartialSum> out;
    for (const auto& step : steps) combine_maybe_different_step(step, out);
    return out;
}

// ----------------------------------------------------------------------------

std::size_t tree_levels(std::size_t n) noexcept {
    std::size_t levels = 0;
    for (std::size_t width = 1; width < n; width *= 2) ++levels;
    return levels;
}

double tree_reduce(std::span<const double> values, std::size_t max_levels) {
    const std::size_t needed = tree_levels(values.size());
    if (needed > max_levels) {
        throw Error(ErrorCode::LevelBudgetExceeded, std::to_string(values.size()) + " inputs need " +
                                                        std::to_string(needed) + " adder levels, budget is " +
                                                        std::to_string(max_levels));
    }
    if (values.empty()) return 0.0;
    std::vector<double> level(values.begin(), values.end());
    while (level.size() > 1) {
        std::vector<double> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t k = 0; k + 1 < level.size(); k += 2) next.push_back(level[k] + level[k + 1]);
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level.front();
}

// ----------------------------------------------------------------------------

LinearArrayReducer::LinearArrayReducer(std::size_t cells) : cells_(cells) {
    if (cells_ == 0) throw Error(ErrorCode::InvalidArgument, "a linear array needs at least one cell");
}

void LinearArrayReducer::push(PartialSum record, std::vector<PartialSum>& out) {
    if (watermark_ && record.row <= *watermark_) {
        throw Error(ErrorCode::MonotonicityViolation, "record for row " + std::to_string(record.row) +
                                                          " arrived after row " + std::to_string(*watermark_) +
                                                          " was finalized");
    }
    auto first_kept = std::find_if(buffer_.begin(), buffer_.end(), [&](const Cell& c) { return c.row >= record.row; });
    for (auto it = buffer_.begin(); it != first_kept; ++it) {
        out.push_back({it->row, it->sum});
        watermark_ = it->row;
    }
    buffer_.erase(buffer_.begin(), first_kept);

    if (!buffer_.empty() && buffer_.front().row == record.row) {
        buffer_.front().sum += record.value;
        return;
    }
    if (buffer_.size() == cells_) {
        throw Error(ErrorCode::CapacityExceeded, "row " + std::to_string(record.row) + " needs a cell but all " +
                                                     std::to_string(cells_) + " hold unfinalized rows");
    }
    buffer_.insert(buffer_.begin(), Cell{record.row, record.value});
}

void LinearArrayReducer::flush(std::vector<PartialSum>& out) {
    for (const auto& c : buffer_) {
        out.push_back({c.row, c.sum});
        watermark_ = c.row;
    }
    buffer_.clear();
}

std::vector<PartialSum> linear_array_reduce(std::span<const PartialSum> input, std::size_t cells) {
    LinearArrayReducer array(cells);
    std::vector<PartialSum> out;
    for (const auto& r : input) array.push(r, out);
    array.flush(out);
    return out;
}

// ----------------------------------------------------------------------------

FusedAccumulator::FusedAccumulator(std::size_t streams, std::size_t synthetic_from)
    : registers_(streams), closed_(streams), synthetic_from_(synthetic_from) {}

void FusedAccumulator::step(std::span<const std::optional<PartialSum>> items, std::vector<PartialSum>& out) {
    if (items.size() != registers_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one item slot per served stream is required");
    }
    for (std::size_t a = 0; a < items.size(); ++a) {
        for (std::size_t b = a + 1; b < items.size(); ++b) {
            if (items[a] && items[b] && items[a]->row == items[b]->row && items[a]->row < synthetic_from_) {
                throw Error(ErrorCode::PropertyViolated, "streams " + std::to_string(a) + " and " +
                                                             std::to_string(b) + " both reduce row " +
                                                             std::to_string(items[a]->row) + " at step " +
                                                             std::to_string(steps_));
            }
        }
    }
    for (std::size_t s = 0; s < items.size(); ++s) {
        if (!items[s]) continue;
        if (closed_[s].contains(items[s]->row)) {
            throw Error(ErrorCode::PropertyViolated, "stream " + std::to_string(s) + " returns to row " +
                                                         std::to_string(items[s]->row) + " at step " +
                                                         std::to_string(steps_));
        }
        if (auto done = registers_[s].push(*items[s])) {
            closed_[s].insert(done->row);
            out.push_back(*done);
        }
    }
    ++steps_;
}

void FusedAccumulator::flush(std::vector<PartialSum>& out) {
    for (std::size_t s = 0; s < registers_.size(); ++s) {
        if (auto done = registers_[s].flush()) {
            closed_[s].insert(done->row);
            out.push_back(*done);
        }
    }
}

std::vector<PartialSum> fused_accumulator(const std::vector<std::vector<PartialSum>>& streams, std::size_t adders,
                                          std::size_t synthetic_from) {
    const std::size_t m = streams.size();
    if (adders == 0 || m % adders != 0) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(adders) + " adders cannot evenly serve " +
                                                    std::to_string(m) + " streams");
    }
    if (m == 0) return {};
    const std::size_t len = streams.front().size();
    std::vector<std::vector<std::size_t>> rows(m);
    for (std::size_t s = 0; s < m; ++s) {
        if (streams[s].size() != len) throw Error(ErrorCode::DimensionMismatch, "streams must be equally long");
        for (const auto& item : streams[s]) rows[s].push_back(item.row);
        if (!check_continuous(rows[s])) {
            throw Error(ErrorCode::PropertyViolated, "stream " + std::to_string(s) + " is not continuous");
        }
    }
    if (!check_distinct(rows, synthetic_from)) {
        throw Error(ErrorCode::PropertyViolated, "streams reduce into the same row at the same step");
    }

    const std::size_t per_adder = m / adders;
    std::vector<FusedAccumulator> units(adders, FusedAccumulator(per_adder, synthetic_from));
    std::vector<PartialSum> out;
    std::vector<std::optional<PartialSum>> turn(per_adder);
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t a = 0; a < adders; ++a) {
            for (std::size_t k = 0; k < per_adder; ++k) turn[k] = streams[a + k * adders][t];
            units[a].step(turn, out);
        }
    }
    for (auto& unit : units) unit.flush(out);
    return out;
}

}  // namespace sparsespace
