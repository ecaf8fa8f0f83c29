#include "sparsespace/designs.hpp"

#include "sparsespace/error.hpp"
#include "sparsespace/reduction.hpp"
#include "stages.hpp"

namespace sparsespace {

namespace {

std::string lane(std::string_view base, std::size_t i) { return std::string(base) + "[" + std::to_string(i) + "]"; }

std::string lane(std::string_view base, std::size_t i, std::size_t l) {
    return lane(base, i) + "[" + std::to_string(l) + "]";
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::BadParameters, what);
}

void check_inputs(const EncodedMatrix& e, const DenseVector& x) {
    if (x.size() != e.n_cols)
        throw Error(ErrorCode::DimensionMismatch, "x has length " + std::to_string(x.size()) + " but the matrix has " +
                                                      std::to_string(e.n_cols) + " columns");
    require(e.packed_dim() == Dim::Columns, "the designs stream rows packed along columns");
}

PipelineGraph cisr_graph(const CisrDesignParams& p, const EncodedMatrix& e, const DenseVector& x) {
    validate(p);
    const auto* rl = std::get_if<RowLengths>(&e.structure);
    require(rl != nullptr, "cisr needs an encoding with row_len structure");
    require(e.machines == p.machines, "encoding has " + std::to_string(e.machines) + " machines, design expects " +
                                          std::to_string(p.machines));
    const std::size_t m = p.machines;

    PipelineGraph g;
    g.summary = TraceSummary{"cisr", m, e.stream_length, e.nnz(), e.n_rows};
    std::vector<ChannelId> vals(m), cols(m), lens(m), xs(m), rows(m), prods(m);
    for (std::size_t i = 0; i < m; ++i) {
        vals[i] = g.add_channel(lane("A.values", i), ElementKind::Value);
        cols[i] = g.add_channel(lane("A.col_idx", i), ElementKind::Index);
        lens[i] = g.add_channel(lane("A.row_len", i), ElementKind::Structure);
        xs[i] = g.add_channel(lane("x", i), ElementKind::Value);
        rows[i] = g.add_channel(lane("rows", i), ElementKind::Index);
        prods[i] = g.add_channel(lane("products", i), ElementKind::PartialSum);
    }
    std::vector<ChannelId> sums(p.adders);
    for (std::size_t a = 0; a < p.adders; ++a) sums[a] = g.add_channel(lane("sums", a), ElementKind::PartialSum);
    const ChannelId y = g.add_channel("y", ElementKind::Value);

    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::vector<Token>> lanes(3);
        for (std::size_t t = 0; t < e.stream_length; ++t) {
            lanes[0].emplace_back(e.values[i][t]);
            lanes[1].emplace_back(e.col_idx[i][t]);
        }
        for (std::size_t len : rl->per_machine.at(i)) lanes[2].emplace_back(len);
        g.emplace_stage<stages::LaneLoader>({}, {vals[i], cols[i], lens[i]}, lane("A_loader", i), std::move(lanes));
    }
    g.emplace_stage<stages::XGatherLoader>(cols, xs, "x_loader", x);
    g.emplace_stage<stages::RowDecoder>(lens, rows, "decoder", m, e.n_rows);
    for (std::size_t i = 0; i < m; ++i)
        g.emplace_stage<stages::RowMultiplier>({vals[i], xs[i], rows[i]}, {prods[i]}, lane("multiplier", i));
    for (std::size_t a = 0; a < p.adders; ++a) {
        std::vector<ChannelId> in;
        std::vector<std::size_t> ids;
        for (std::size_t s = a; s < m; s += p.adders) {
            in.push_back(prods[s]);
            ids.push_back(s);
        }
        g.emplace_stage<stages::FusedAccumulatorStage>(in, {sums[a]}, lane("fused_accumulator", a), ids, e.n_rows);
    }
    g.emplace_stage<stages::YUnloader>(sums, {y}, "y_unloader", e.n_rows);
    return g;
}

PipelineGraph blocked_graph(const BlockedDesignParams& p, const EncodedMatrix& e, const DenseVector& x) {
    validate(p);
    const auto* rb = std::get_if<RowBlocks>(&e.structure);
    require(rb != nullptr, "blocked needs an encoding with row_blocks structure");
    const std::size_t f = p.block_factor();
    require(rb->factor == f, "encoding has block factor " + std::to_string(rb->factor) + ", design expects " +
                                 std::to_string(f));
    require(e.machines == p.machines, "encoding has " + std::to_string(e.machines) + " machines, design expects " +
                                          std::to_string(p.machines));
    require(e.stream_length % f == 0, "stream length is not a whole number of blocks");
    const std::size_t m = p.machines;
    const std::size_t total_blocks = m * (e.stream_length / f);

    PipelineGraph g;
    g.summary = TraceSummary{"blocked", m, e.stream_length, e.nnz(), e.n_rows};
    std::vector<std::vector<ChannelId>> vals(m), cols(m), xs(m), prods(m);
    std::vector<ChannelId> all_cols, all_xs, block_sums(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < f; ++l) {
            vals[i].push_back(g.add_channel(lane("A.values", i, l), ElementKind::Value));
            cols[i].push_back(g.add_channel(lane("A.col_idx", i, l), ElementKind::Index));
            xs[i].push_back(g.add_channel(lane("x", i, l), ElementKind::Value));
            prods[i].push_back(g.add_channel(lane("products", i, l), ElementKind::Value));
            all_cols.push_back(cols[i].back());
            all_xs.push_back(xs[i].back());
        }
        block_sums[i] = g.add_channel(lane("block_sums", i), ElementKind::Value);
    }
    const ChannelId counts = g.add_channel("A.row_blocks", ElementKind::Structure);
    const ChannelId labels = g.add_channel("block_labels", ElementKind::BlockLabel);
    const ChannelId pairs = g.add_channel("paired_sums", ElementKind::PartialSum);
    const ChannelId rows = g.add_channel("row_sums", ElementKind::PartialSum);
    const ChannelId y = g.add_channel("y", ElementKind::Value);

    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::vector<Token>> lanes(2 * f);
        for (std::size_t t = 0; t < e.stream_length; ++t) {
            lanes[t % f].emplace_back(e.values[i][t]);
            lanes[f + t % f].emplace_back(e.col_idx[i][t]);
        }
        std::vector<ChannelId> out = vals[i];
        out.insert(out.end(), cols[i].begin(), cols[i].end());
        g.emplace_stage<stages::LaneLoader>({}, out, lane("A_loader", i), std::move(lanes));
    }
    {
        std::vector<std::vector<Token>> lanes(1);
        for (std::size_t c : rb->counts) lanes[0].emplace_back(c);
        g.emplace_stage<stages::LaneLoader>({}, {counts}, "row_blocks_loader", std::move(lanes));
    }
    g.emplace_stage<stages::XGatherLoader>(all_cols, all_xs, "x_loader", x);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < f; ++l)
            g.emplace_stage<stages::Multiplier>({vals[i][l], xs[i][l]}, {prods[i][l]}, lane("multiplier", i, l));
    for (std::size_t i = 0; i < m; ++i)
        g.emplace_stage<stages::AdderTreeStage>(prods[i], {block_sums[i]}, lane("adder_tree", i), i, tree_levels(f));
    g.emplace_stage<stages::BlockDecoder>({counts}, {labels}, "block_decoder", m, total_blocks);
    std::vector<ChannelId> pair_in = block_sums;
    pair_in.push_back(labels);
    g.emplace_stage<stages::PairAdder>(pair_in, {pairs}, "pair_adder", m);
    g.emplace_stage<stages::LinearArrayStage>({pairs}, {rows}, "linear_array", p.linear_array_levels);
    g.emplace_stage<stages::YUnloader>({rows}, {y}, "y_unloader", e.n_rows);
    return g;
}

DenseVector collect_y(const RunResult& r) {
    DenseVector y;
    for (const auto& t : r.output("y")) y.push_back(std::get<double>(t));
    return y;
}

}  // namespace

void validate(const CisrDesignParams& p) {
    require(p.machines >= 1, "cisr needs at least one machine");
    require(p.adders >= 1, "cisr needs at least one adder");
    require(p.machines % p.adders == 0, std::to_string(p.adders) + " adders do not evenly divide " +
                                            std::to_string(p.machines) + " machines");
}

void validate(const BlockedDesignParams& p) {
    require(p.k >= 2 && p.k % 2 == 0, "k must be even and at least 2, got " + std::to_string(p.k));
    require(p.machines >= 1, "blocked needs at least one machine");
    require(p.linear_array_levels >= 1, "the linear array needs at least one level");
}

std::vector<std::string> design_names() { return {"cisr", "blocked"}; }

DesignParams resolve(const DesignDescriptor& d) {
    if (d.name == "cisr") {
        require(!d.k && !d.levels, "cisr takes no block size or linear array levels");
        CisrDesignParams p;
        if (d.machines) p.machines = *d.machines;
        if (d.adders) p.adders = *d.adders;
        validate(p);
        return p;
    }
    if (d.name == "blocked") {
        require(!d.adders, "blocked takes no adder count");
        BlockedDesignParams p;
        if (d.machines) p.machines = *d.machines;
        if (d.k) p.k = *d.k;
        if (d.levels) p.linear_array_levels = *d.levels;
        validate(p);
        return p;
    }
    throw Error(ErrorCode::UnknownDesign, "unknown design '" + d.name + "' (expected cisr or blocked)");
}

std::string design_name(const DesignParams& p) {
    return std::holds_alternative<CisrDesignParams>(p) ? "cisr" : "blocked";
}

std::size_t machines_of(const DesignParams& p) {
    return std::visit([](const auto& q) { return q.machines; }, p);
}

RepresentationSpec spec_for(const DesignParams& p) {
    if (const auto* c = std::get_if<CisrDesignParams>(&p)) {
        validate(*c);
        return cisr_spec(c->machines);
    }
    const auto& b = std::get<BlockedDesignParams>(p);
    validate(b);
    return blocked_spec(b.block_factor(), b.machines);
}

EncodedMatrix encode_for(const DenseMatrix& a, const DesignParams& p) { return encode(a, spec_for(p)); }

PipelineGraph build_graph(const DesignParams& p, const EncodedMatrix& e, const DenseVector& x) {
    check_inputs(e, x);
    if (const auto* c = std::get_if<CisrDesignParams>(&p)) return cisr_graph(*c, e, x);
    return blocked_graph(std::get<BlockedDesignParams>(p), e, x);
}

PipelineGraph build_graph(const DesignDescriptor& d, const EncodedMatrix& e, const DenseVector& x) {
    return build_graph(resolve(d), e, x);
}

SpmvResult run_encoded(const DesignParams& p, const EncodedMatrix& e, const DenseVector& x,
                       const RunOptions& options) {
    PipelineGraph g = build_graph(p, e, x);
    RunResult r = run(g, options);
    return SpmvResult{collect_y(r), std::move(r.trace), e};
}

SpmvResult run_design(const DesignParams& p, const DenseMatrix& a, const DenseVector& x, const RunOptions& options) {
    if (x.size() != a.cols())
        throw Error(ErrorCode::DimensionMismatch, "x has length " + std::to_string(x.size()) + " but the matrix has " +
                                                      std::to_string(a.cols()) + " columns");
    return run_encoded(p, encode_for(a, p), x, options);
}

SpmvResult run_design(const DesignDescriptor& d, const DenseMatrix& a, const DenseVector& x,
                      const RunOptions& options) {
    return run_design(resolve(d), a, x, options);
}

SpmvResult design_cisr_spmv(const DenseMatrix& a, const DenseVector& x, const CisrDesignParams& p,
                            const RunOptions& options) {
    return run_design(DesignParams{p}, a, x, options);
}

SpmvResult design_blocked_spmv(const DenseMatrix& a, const DenseVector& x, const BlockedDesignParams& p,
                               const RunOptions& options) {
    return run_design(DesignParams{p}, a, x, options);
}

}  // namespace sparsespace
