#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "sparsespace/sparsespace.hpp"

namespace sparsespace::cli {

namespace {

using json = nlohmann::ordered_json;

// Raised for bad input or usage; reported on stderr with exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto log = std::make_shared<spdlog::logger>("sparsespace", sink);
    log->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("SPARSESPACE_LOG"); env != nullptr && *env != '\0') {
        level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; accept numeric levels too.
        if (level == spdlog::level::off && std::string_view(env) != "off") {
            int n = 0;
            auto [p, ec] = std::from_chars(env, env + std::strlen(env), n);
            level = (ec == std::errc{} && n >= 0 && n <= 6) ? static_cast<spdlog::level::level_enum>(n)
                                                             : spdlog::level::warn;
        }
    }
    log->set_level(level);
    return log;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
    if (!path) {
        out << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + *path + "'");
    f << text;
}

DenseMatrix load_matrix(const std::string& path) {
    try {
        return parse_matrix_market(read_text(path));
    } catch (const Error& e) {
        throw InputError(path + ": " + e.what());
    }
}

// Numbers separated by whitespace or commas; '#' and '%' start comments.
DenseVector load_vector(const std::string& path) {
    std::istringstream in(read_text(path));
    DenseVector x;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto c = line.find_first_of("#%"); c != std::string::npos) line.erase(c);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v))
                throw InputError(path + ": line " + std::to_string(line_no) + ": '" + tok + "' is not a number");
            x.push_back(v);
        }
    }
    return x;
}

struct DesignFlags {
    std::string design = "cisr";
    std::optional<std::size_t> machines;
    std::optional<std::size_t> k;
    std::optional<std::size_t> adders;
    std::optional<std::size_t> levels;

    bool circuits = true;

    void add_to(CLI::App& cmd, bool with_circuits) {
        circuits = with_circuits;
        cmd.add_option("--design", design, "Design / representation: cisr or blocked")
            ->check(CLI::IsMember({"cisr", "blocked"}));
        cmd.add_option("-m,--machines", machines, "Number of machines (streams)");
        cmd.add_option("-k", k, "Blocked design: multipliers per block pair (block size k/2)");
        if (with_circuits) {
            cmd.add_option("--adders", adders, "CISR design: fused accumulators");
            cmd.add_option("--levels", levels, "Blocked design: linear array cells");
        }
    }

    // Commands that only encode have no reduction circuit, so the adder
    // count cannot constrain the machine count there.
    DesignParams resolve() const {
        std::optional<std::size_t> a = adders;
        if (!circuits && design == "cisr") a = 1;
        return sparsespace::resolve(DesignDescriptor{design, machines, a, k, levels});
    }
};

std::string params_text(const DesignParams& p) {
    if (const auto* c = std::get_if<CisrDesignParams>(&p))
        return fmt::format("cisr m={} adders={}", c->machines, c->adders);
    const auto& b = std::get<BlockedDesignParams>(p);
    return fmt::format("blocked m={} k={} levels={}", b.machines, b.k, b.linear_array_levels);
}

json params_json(const DesignParams& p) {
    json j;
    j["design"] = design_name(p);
    if (const auto* c = std::get_if<CisrDesignParams>(&p)) {
        j["machines"] = c->machines;
        j["adders"] = c->adders;
    } else {
        const auto& b = std::get<BlockedDesignParams>(p);
        j["machines"] = b.machines;
        j["k"] = b.k;
        j["levels"] = b.linear_array_levels;
    }
    return j;
}

// ----------------------------------------------------------------------------
// Verification against the dense oracle
// ----------------------------------------------------------------------------

struct Verdict {
    bool ok = true;
    bool exact = true;
    std::size_t index = 0;
    double got = 0.0;
    double expected = 0.0;
};

// Exact when A and x are integral; otherwise |y - ref| <= 1e-6 |ref|, with
// the row's sum of |A(i,j) x(j)| standing in for |ref| when ref is 0.
Verdict verify(const DenseMatrix& a, const DenseVector& x, const DenseVector& y) {
    Verdict v;
    v.exact = all_integral(a.values()) && all_integral(x);
    const DenseVector ref = spmv_oracle(a, x);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        bool ok = y[i] == ref[i];
        if (!ok && !v.exact) {
            double scale = std::abs(ref[i]);
            if (scale == 0.0)
                for (std::size_t j = 0; j < a.cols(); ++j) scale += std::abs(a(i, j) * x[j]);
            ok = std::abs(y[i] - ref[i]) <= 1e-6 * scale;
        }
        if (!ok) {
            v.ok = false;
            v.index = i;
            v.got = y[i];
            v.expected = ref[i];
            return v;
        }
    }
    return v;
}

// ----------------------------------------------------------------------------
// Subcommands
// ----------------------------------------------------------------------------

struct EncodeArgs {
    std::string input;
    DesignFlags flags;
    std::optional<std::string> output;
    int indent = -1;
};

int cmd_encode(const EncodeArgs& args, std::ostream& out, spdlog::logger& log) {
    const DesignParams p = args.flags.resolve();
    const DenseMatrix a = load_matrix(args.input);
    const EncodedMatrix e = encode_for(a, p);
    log.info("encoded {}x{} ({} nonzeros) as {}: L={}, padded={}", a.rows(), a.cols(), e.nnz(), params_text(p),
             e.stream_length, e.padded_slots());
    write_text(args.output, encoded_to_json(e, args.indent) + "\n", out);
    return kExitOk;
}

EncodedMatrix load_encoded(const std::string& path) {
    EncodedMatrix e;
    try {
        e = encoded_from_json(read_text(path));
    } catch (const Error& err) {
        throw InputError(path + ": " + err.what());
    }
    const IntegrityReport report = verify_integrity(e);
    if (!report.ok()) {
        std::string msg = path + ": " + std::string(to_string(ErrorCode::IntegrityError)) + ":";
        for (const auto& p : report.problems) msg += "\n  " + p;
        throw InputError(msg);
    }
    return e;
}

struct DecodeArgs {
    std::string input;
    std::optional<std::string> output;
};

int cmd_decode(const DecodeArgs& args, std::ostream& out, spdlog::logger& log) {
    const EncodedMatrix e = load_encoded(args.input);
    const DenseMatrix a = decode(e);
    log.info("decoded {} machines x {} slots into {}x{} with {} nonzeros", e.machines, e.stream_length, a.rows(),
             a.cols(), a.nnz());
    write_text(args.output, to_matrix_market(a), out);
    return kExitOk;
}

struct SpmvArgs {
    std::string input;
    DesignFlags flags;
    std::optional<std::string> x_path;
    bool ones = false;
    std::optional<std::uint64_t> seed;
    bool verify = false;
    std::string format = "csv";
    std::optional<std::string> stats_path;
    std::optional<std::string> trace_path;
    std::optional<std::string> reductions_path;
    std::size_t budget = 0;
    std::optional<std::size_t> inject_fault;
};

int cmd_spmv(const SpmvArgs& args, std::ostream& out, std::ostream& err, spdlog::logger& log) {
    const DesignParams p = args.flags.resolve();
    const DenseMatrix a = load_matrix(args.input);
    const int sources = (args.x_path ? 1 : 0) + (args.ones ? 1 : 0) + (args.seed ? 1 : 0);
    if (sources != 1) throw InputError("give exactly one of --x FILE, --ones, or --seed N for the x vector");
    DenseVector x;
    if (args.x_path) {
        x = load_vector(*args.x_path);
    } else if (args.ones) {
        x.assign(a.cols(), 1.0);
    } else {
        std::mt19937_64 rng(*args.seed);
        for (std::size_t j = 0; j < a.cols(); ++j) x.push_back(static_cast<double>(static_cast<int>(rng() % 11) - 5));
    }
    if (x.size() != a.cols())
        throw InputError(fmt::format("x has {} entries but the matrix has {} columns", x.size(), a.cols()));

    RunOptions options;
    if (args.budget > 0) options.budget = args.budget;
    SpmvResult r = run_design(p, a, x, options);
    if (args.inject_fault) {
        if (*args.inject_fault >= r.y.size()) throw InputError("--inject-fault row is out of range");
        r.y[*args.inject_fault] += 1.0;
    }
    const Stats s = stats(r.trace);
    for (const auto& w : s.warnings) log.warn("{}", w);
    log.info("{}: {} rounds, L={}, utilization={}", params_text(p), r.trace.rounds, s.stream_length,
             format_number(s.utilization));

    std::optional<Verdict> verdict;
    if (args.verify) verdict = verify(a, x, r.y);

    if (args.format == "json") {
        json j;
        j["params"] = params_json(p);
        j["y"] = r.y;
        j["stats"] = json::parse(s.to_json());
        if (verdict) j["verified"] = verdict->ok;
        out << j.dump(2) << "\n";
    } else {
        out << "row,y\n";
        for (std::size_t i = 0; i < r.y.size(); ++i) out << i << ',' << format_number(r.y[i]) << "\n";
    }
    if (args.stats_path) write_text(args.stats_path, s.to_json(2) + "\n", out);
    if (args.trace_path) write_text(args.trace_path, r.trace.events_csv(), out);
    if (args.reductions_path) write_text(args.reductions_path, r.trace.reductions_csv(), out);

    if (verdict && !verdict->ok) {
        err << fmt::format("verification failed at row {}: got {}, expected {} ({} comparison)\n", verdict->index,
                           format_number(verdict->got), format_number(verdict->expected),
                           verdict->exact ? "exact" : "relative 1e-6");
        return kExitMismatch;
    }
    if (verdict) log.info("verified against the dense oracle ({})", verdict->exact ? "exact" : "relative 1e-6");
    return kExitOk;
}

struct BenchArgs {
    std::size_t rows = 64;
    std::size_t cols = 64;
    std::vector<double> densities{0.01, 0.05, 0.2, 0.5};
    std::uint64_t seed = 1;
    std::vector<std::size_t> machines{1, 2, 4, 8};
    std::vector<std::size_t> ks{2, 4, 8};
    std::size_t adders = 2;
    std::size_t levels = 4;
    std::string design = "all";
    std::vector<std::string> matrices;
    std::size_t jobs = 1;
    std::string format = "csv";
};

struct BenchCase {
    std::string matrix;
    std::size_t source = 0;
    DesignParams params;
};

struct BenchRow {
    std::size_t nnz = 0;
    std::size_t stream_length = 0;
    std::size_t padded = 0;
    double utilization = 0.0;
    bool verified = false;
    std::string error;
};

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err, spdlog::logger& log) {
    if (args.jobs == 0) throw InputError("--jobs must be at least 1");
    std::vector<std::pair<std::string, DenseMatrix>> sources;
    if (!args.matrices.empty()) {
        for (const auto& path : args.matrices)
            sources.emplace_back(std::filesystem::path(path).stem().string(), load_matrix(path));
    } else {
        for (std::size_t d = 0; d < args.densities.size(); ++d) {
            const double density = args.densities[d];
            if (!(density >= 0.0 && density <= 1.0)) throw InputError("densities must lie in [0, 1]");
            const std::uint64_t seed = args.seed + d;
            sources.emplace_back(fmt::format("rand-{}x{}-d{}-s{}", args.rows, args.cols, format_number(density), seed),
                                 random_sparse(args.rows, args.cols, density, seed));
        }
    }

    std::vector<BenchCase> cases;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        for (std::size_t m : args.machines) {
            if (args.design == "all" || args.design == "cisr") {
                CisrDesignParams c{m, std::gcd(m, args.adders)};
                validate(c);
                cases.push_back({sources[s].first, s, c});
            }
            if (args.design == "all" || args.design == "blocked") {
                for (std::size_t k : args.ks) {
                    BlockedDesignParams b{k, m, args.levels};
                    validate(b);
                    cases.push_back({sources[s].first, s, b});
                }
            }
        }
    }
    log.info("bench: {} matrices, {} configurations, {} workers", sources.size(), cases.size(), args.jobs);

    std::vector<BenchRow> rows(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < cases.size(); c = next++) {
            const auto& bc = cases[c];
            const DenseMatrix& a = sources[bc.source].second;
            BenchRow& row = rows[c];
            try {
                const DenseVector x(a.cols(), 1.0);
                const SpmvResult r = run_design(bc.params, a, x);
                const Stats s = stats(r.trace);
                row.nnz = s.nnz;
                row.stream_length = s.stream_length;
                row.padded = s.padded_slots;
                row.utilization = s.utilization;
                row.verified = verify(a, x, r.y).ok;
            } catch (const Error& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(args.jobs, cases.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool all_ok = true;
    json table = json::array();
    if (args.format == "csv") out << "matrix,design,m,k,L,padded_slots,utilization,verified,note\n";
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const auto& bc = cases[c];
        const BenchRow& row = rows[c];
        const auto* b = std::get_if<BlockedDesignParams>(&bc.params);
        const std::string k = b ? std::to_string(b->k) : "";
        const std::string note = !row.error.empty() ? "error" : (row.nnz == 0 ? "degenerate" : "");
        if (!row.error.empty()) err << bc.matrix << " " << params_text(bc.params) << ": " << row.error << "\n";
        if (!row.verified) all_ok = false;
        if (args.format == "csv") {
            out << fmt::format("{},{},{},{},{},{},{},{},{}\n", bc.matrix, design_name(bc.params),
                               machines_of(bc.params), k, row.stream_length, row.padded,
                               format_number(row.utilization), row.verified ? "yes" : "no", note);
        } else {
            json j;
            j["matrix"] = bc.matrix;
            j["design"] = design_name(bc.params);
            j["m"] = machines_of(bc.params);
            j["k"] = b ? json(b->k) : json(nullptr);
            j["L"] = row.stream_length;
            j["padded_slots"] = row.padded;
            j["utilization"] = row.utilization;
            j["verified"] = row.verified;
            j["note"] = note;
            table.push_back(std::move(j));
        }
    }
    if (args.format == "json") out << table.dump(2) << "\n";
    return all_ok ? kExitOk : kExitMismatch;
}

struct InspectArgs {
    std::string input;
    DesignFlags flags;
    std::string format = "text";
};

int cmd_inspect(const InspectArgs& args, std::ostream& out, spdlog::logger& log) {
    EncodedMatrix e;
    if (args.input.ends_with(".json")) {
        e = load_encoded(args.input);
    } else {
        e = encode_for(load_matrix(args.input), args.flags.resolve());
    }
    const auto rows = decode_slot_rows(e);
    log.info("inspecting {} machines x {} slots", e.machines, e.stream_length);

    if (args.format == "json") {
        json j;
        j["spec"] = json::parse(spec_to_json(e.spec));
        j["origin_dims"] = {e.n_rows, e.n_cols};
        j["machines"] = e.machines;
        j["stream_length"] = e.stream_length;
        json ms = json::array();
        for (std::size_t k = 0; k < e.machines; ++k) {
            json m;
            m["values"] = e.values[k];
            m["col_idx"] = e.col_idx[k];
            m["decoded_rows"] = rows[k];
            if (const auto* rl = std::get_if<RowLengths>(&e.structure)) m["row_len"] = rl->per_machine[k];
            ms.push_back(std::move(m));
        }
        j["streams"] = std::move(ms);
        if (const auto* rb = std::get_if<RowBlocks>(&e.structure)) {
            j["row_blocks"] = rb->counts;
            j["block_factor"] = rb->factor;
        }
        out << j.dump(2) << "\n";
        return kExitOk;
    }

    out << fmt::format("representation {}  origin {}x{}  machines {}  stream_length {}  nnz {}  padded {}\n",
                       e.spec.name.empty() ? "(unnamed)" : e.spec.name, e.n_rows, e.n_cols, e.machines,
                       e.stream_length, e.nnz(), e.padded_slots());
    if (const auto* rb = std::get_if<RowBlocks>(&e.structure))
        out << fmt::format("row_blocks (factor {}): {}\n", rb->factor, fmt::join(rb->counts, " "));
    for (std::size_t k = 0; k < e.machines; ++k) {
        out << fmt::format("\nmachine {}", k);
        if (const auto* rl = std::get_if<RowLengths>(&e.structure))
            out << fmt::format("  row_len: {}", fmt::join(rl->per_machine[k], " "));
        out << "\n";
        out << fmt::format("  {:>5}  {:>12}  {:>7}  {:>6}  {}\n", "pos", "value", "col_idx", "row", "origin");
        for (std::size_t t = 0; t < e.stream_length; ++t) {
            const auto& o = e.provenance[k][t];
            const std::size_t row = rows[k][t];
            const std::string row_text =
                row < e.major_extent() ? std::to_string(row) : fmt::format("{}*", row);
            const std::string origin = o ? fmt::format("({},{})", o->row, o->col) : "pad";
            out << fmt::format("  {:>5}  {:>12}  {:>7}  {:>6}  {}\n", t, format_number(e.values[k][t]),
                               e.col_idx[k][t], row_text, origin);
        }
    }
    out << "\n* synthetic row (padding only)\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);

    CLI::App app{"Sparse matrix encoder, decoder, and dataflow SpMV simulator", "sparsespace"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sparsespace 0.1.0");

    EncodeArgs enc;
    auto* encode_cmd = app.add_subcommand("encode", "Encode a Matrix Market file as JSON streams");
    encode_cmd->add_option("matrix", enc.input, "Matrix Market file")->required();
    enc.flags.add_to(*encode_cmd, false);
    encode_cmd->add_option("-o,--output", enc.output, "Write JSON here instead of stdout");
    encode_cmd->add_option("--indent", enc.indent, "Pretty-print with this indent (default: compact)");

    DecodeArgs dec;
    auto* decode_cmd = app.add_subcommand("decode", "Decode JSON streams back to Matrix Market");
    decode_cmd->add_option("encoded", dec.input, "Encoded JSON file")->required();
    decode_cmd->add_option("-o,--output", dec.output, "Write Matrix Market here instead of stdout");

    SpmvArgs sp;
    auto* spmv_cmd = app.add_subcommand("spmv", "Simulate SpMV through a design");
    spmv_cmd->add_option("matrix", sp.input, "Matrix Market file")->required();
    sp.flags.add_to(*spmv_cmd, true);
    spmv_cmd->add_option("--x", sp.x_path, "File with x values (whitespace or comma separated)");
    spmv_cmd->add_flag("--ones", sp.ones, "Use x = all ones");
    spmv_cmd->add_option("--seed", sp.seed, "Use a random integer x drawn with this seed");
    spmv_cmd->add_flag("--verify", sp.verify, "Compare y against the dense oracle; exit 2 on mismatch");
    spmv_cmd->add_option("--format", sp.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    spmv_cmd->add_option("--stats", sp.stats_path, "Write run statistics as JSON");
    spmv_cmd->add_option("--trace", sp.trace_path, "Write the per-stage event log as CSV");
    spmv_cmd->add_option("--reductions", sp.reductions_path, "Write the reduction event log as CSV");
    spmv_cmd->add_option("--budget", sp.budget, "Work items per stage firing (default: unlimited)");
    spmv_cmd->add_option("--inject-fault", sp.inject_fault, "Add 1 to y(ROW) before verifying (exercises exit code 2)")
        ->group("Testing");

    BenchArgs bn;
    auto* bench_cmd = app.add_subcommand("bench", "Tabulate stream length and utilization over a grid");
    bench_cmd->add_option("--rows", bn.rows, "Rows of generated matrices")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--cols", bn.cols, "Columns of generated matrices")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--densities", bn.densities, "Densities of generated matrices")->delimiter(',');
    bench_cmd->add_option("--seed", bn.seed, "Seed of the first generated matrix");
    bench_cmd->add_option("-m,--machines", bn.machines, "Machine counts")->delimiter(',');
    bench_cmd->add_option("-k", bn.ks, "Blocked design k values")->delimiter(',');
    bench_cmd->add_option("--adders", bn.adders, "CISR adders (reduced to gcd with m)");
    bench_cmd->add_option("--levels", bn.levels, "Blocked design linear array cells");
    bench_cmd->add_option("--design", bn.design, "cisr, blocked, or all")
        ->check(CLI::IsMember({"cisr", "blocked", "all"}));
    bench_cmd->add_option("--matrix", bn.matrices, "Matrix Market files instead of generated matrices");
    bench_cmd->add_option("--jobs", bn.jobs, "Worker threads; output order does not depend on it");
    bench_cmd->add_option("--format", bn.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    InspectArgs in;
    auto* inspect_cmd = app.add_subcommand("inspect", "Show streams, structure, and decoded rows side by side");
    inspect_cmd->add_option("input", in.input, "Matrix Market file or encoded .json")->required();
    in.flags.add_to(*inspect_cmd, false);
    inspect_cmd->add_option("--format", in.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*encode_cmd) return cmd_encode(enc, out, *log);
        if (*decode_cmd) return cmd_decode(dec, out, *log);
        if (*spmv_cmd) return cmd_spmv(sp, out, err, *log);
        if (*bench_cmd) return cmd_bench(bn, out, err, *log);
        if (*inspect_cmd) return cmd_inspect(in, out, *log);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace sparsespace::cli
