// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"

using namespace sparsespace;

namespace {

struct Case {
    oracle::Grid grid;
    DenseMatrix a{1, 1};
    bool integers = true;
    std::size_t machines = 1;
    std::size_t k = 2;       // blocked design k; block factor k / 2
    std::size_t adders = 1;  // cisr design adders, a divisor of machines
    std::string label;
};

// Collects failure notes for one criterion; prints a single line at the end.
class Criterion {
public:
    Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

    void check(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    void note(std::string text) { note_ = std::move(text); }

    bool report() const {
        std::cout << (failed_ == 0 ? "PASS" : "FAIL") << "  criterion " << number_ << ": " << title_ << " ("
                  << checks_ << " checks";
        if (!note_.empty()) std::cout << ", " << note_;
        std::cout << ")\n";
        for (const auto& f : failures_) std::cout << "        " << f << "\n";
        if (failed_ > failures_.size()) std::cout << "        ... " << failed_ - failures_.size() << " more\n";
        return failed_ == 0;
    }

private:
    int number_;
    std::string title_;
    std::string note_;
    std::size_t checks_ = 0;
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
};

std::vector<Case> envelope() {
    const std::array<double, 4> densities{0.01, 0.05, 0.2, 0.5};
    const std::array<std::size_t, 5> machines{1, 2, 3, 4, 8};
    const std::array<std::size_t, 3> ks{2, 4, 8};
    std::mt19937_64 rng(20240501);
    std::vector<Case> cases;
    for (std::size_t n = 0; n < 600; ++n) {
        Case c;
        const std::size_t rows = 1 + rng() % 128, cols = 1 + rng() % 128;
        const double density = densities[n % densities.size()];
        c.integers = (n / densities.size()) % 2 == 0;
        c.grid = oracle::random_grid(rows, cols, density, rng(), c.integers);
        c.a = support::to_dense(c.grid);
        c.machines = machines[(n / 2) % machines.size()];
        c.k = ks[n % ks.size()];
        std::vector<std::size_t> divisors;
        for (std::size_t d = 1; d <= c.machines; ++d)
            if (c.machines % d == 0) divisors.push_back(d);
        c.adders = divisors[rng() % divisors.size()];
        c.label = "case " + std::to_string(n) + " (" + std::to_string(rows) + "x" + std::to_string(cols) +
                  ", d=" + format_number(density) + ", m=" + std::to_string(c.machines) + ")";
        cases.push_back(std::move(c));
    }
    return cases;
}

// Dense-row label of every slot, per machine, straight from provenance.
std::vector<std::vector<std::optional<std::size_t>>> provenance_rows(const EncodedMatrix& e) {
    std::vector<std::vector<std::optional<std::size_t>>> out(e.machines);
    for (std::size_t k = 0; k < e.machines; ++k)
        for (const auto& o : e.provenance[k]) out[k].push_back(o ? std::optional<std::size_t>(o->row) : std::nullopt);
    return out;
}

bool decoder_matches(const std::vector<std::vector<std::size_t>>& decoded, const EncodedMatrix& e) {
    const auto truth = provenance_rows(e);
    if (decoded.size() != truth.size()) return false;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (decoded[k].size() != truth[k].size()) return false;
        for (std::size_t t = 0; t < truth[k].size(); ++t)
            if (truth[k][t] && decoded[k][t] != *truth[k][t]) return false;
    }
    return true;
}

bool y_matches(const DenseVector& y, const DenseVector& ref, bool exact) {
    return support::close_enough(y, ref, exact);
}

std::vector<double> x_for(const Case& c, std::uint64_t salt) {
    return oracle::random_x(c.a.cols(), salt, c.integers);
}

// ---------------------------------------------------------------------------

bool criterion_roundtrip(const std::vector<Case>& cases) {
    Criterion cr(1, "roundtrip identity decode(encode(A)) == A, both representations");
    std::size_t matrices = 0;
    for (const auto& c : cases) {
        for (const auto& spec : {cisr_spec(c.machines), blocked_spec(c.k / 2, c.machines)}) {
            const EncodedMatrix e = encode(c.a, spec);
            cr.check(decode(e) == c.a, spec.name + " " + c.label);
            cr.check(check_roundtrip(e, c.a).passed, "slot check " + spec.name + " " + c.label);
        }
        ++matrices;
    }
    cr.note(std::to_string(matrices) + " random matrices, zero tolerance");
    return cr.report();
}

bool criterion_oracle(const std::vector<Case>& cases) {
    Criterion cr(2, "simulated y equals the dense oracle (exact on integers, 1e-6 relative on reals)");
    std::size_t ints = 0, reals = 0;
    for (std::size_t n = 0; n < cases.size(); ++n) {
        const auto& c = cases[n];
        const auto x = x_for(c, n);
        const auto ref = oracle::dense_spmv(c.grid, x);
        cr.check(y_matches(spmv_oracle(c.a, x), ref, c.integers), "library oracle " + c.label);
        const auto cy = design_cisr_spmv(c.a, x, {c.machines, c.adders}).y;
        const auto by = design_blocked_spmv(c.a, x, {c.k, c.machines, 4}).y;
        cr.check(y_matches(cy, ref, c.integers), "cisr " + c.label);
        cr.check(y_matches(by, ref, c.integers), "blocked k=" + std::to_string(c.k) + " " + c.label);
        (c.integers ? ints : reals) += 1;
    }
    cr.note(std::to_string(ints) + " integer and " + std::to_string(reals) + " real matrices");
    return cr.report();
}

bool criterion_decoders(const std::vector<Case>& cases) {
    Criterion cr(3, "streaming decoders reproduce provenance rows");
    for (const auto& c : cases) {
        const EncodedMatrix e = encode(c.a, cisr_spec(c.machines));
        const auto& rl = std::get<RowLengths>(e.structure);
        cr.check(decoder_matches(streaming_row_decoder(rl.per_machine, c.a.rows()), e), "row decoder " + c.label);

        const std::size_t f = c.k / 2;
        const EncodedMatrix b = encode(c.a, blocked_spec(f, c.machines));
        const auto& rb = std::get<RowBlocks>(b.structure);
        const auto labels = streaming_block_decoder(rb.counts, f, c.machines, c.machines * b.stream_length / f);
        cr.check(decoder_matches(block_slot_rows(labels, f, c.machines), b), "block decoder " + c.label);
        // Independent block oracle: every real block's row.
        const auto blocks = oracle::blocks_of(c.grid, f, c.machines, {});
        bool rows_ok = labels.size() >= blocks.size();
        for (std::size_t i = 0; rows_ok && i < blocks.size(); ++i) rows_ok = labels[i].row == blocks[i].row;
        cr.check(rows_ok, "block oracle rows " + c.label);
    }
    return cr.report();
}

bool criterion_fixture() {
    Criterion cr(4, "worked 4x4 fixture on two machines");
    const auto a = support::read_fixture();
    cr.check(a == support::fixture(), "fixture.mtx parses to the fixture");
    const auto greedy = oracle::greedy_schedule({3, 1, 2, 2}, 2);
    cr.check(greedy == std::vector<std::size_t>{0, 1, 1, 0}, "brute-force scheduler assignment");

    const EncodedMatrix e = encode(a, cisr_spec(2));
    std::vector<std::set<std::size_t>> assigned(2);
    for (std::size_t k = 0; k < 2; ++k)
        for (const auto& o : e.provenance[k])
            if (o) assigned[k].insert(o->row);
    cr.check(assigned[0] == std::set<std::size_t>{0, 3}, "M0 rows {0,3}");
    cr.check(assigned[1] == std::set<std::size_t>{1, 2}, "M1 rows {1,2}");
    cr.check(e.stream_length == 5, "L = 5");
    const auto& rl = std::get<RowLengths>(e.structure);
    cr.check(rl.per_machine[0] == std::vector<std::size_t>{3, 2}, "row_len M0 = [3,2]");
    cr.check(rl.per_machine[1] == std::vector<std::size_t>{1, 4}, "row_len M1 = [1,4]");
    cr.check(e.values[0] == std::vector<double>{1, 2, 3, 7, 8}, "M0 values");
    cr.check(e.values[1] == std::vector<double>{4, 5, 6, 0, 0}, "M1 values");
    cr.check(e.col_idx[0] == std::vector<std::size_t>{0, 1, 3, 1, 2}, "M0 col_idx");
    cr.check(e.col_idx[1] == std::vector<std::size_t>{2, 0, 3, 0, 0}, "M1 col_idx");
    const auto ex = oracle::cisr_expectation(oracle::fixture(), 2);
    cr.check(ex.stream_length == 5 && ex.row_len == rl.per_machine, "oracle streams agree");

    std::ifstream golden(support::data_path("fixture_cisr_m2.json"));
    std::stringstream ss;
    ss << golden.rdbuf();
    cr.check(encoded_from_json(ss.str()) == e, "golden encoding file");

    const DenseVector expect{6, 4, 11, 15};
    cr.check(oracle::dense_spmv(oracle::fixture(), support::ones(4)) == expect, "dense oracle y");
    cr.check(design_cisr_spmv(a, support::ones(4), {2, 1}).y == expect, "cisr design y");
    cr.check(design_cisr_spmv(a, support::ones(4), {2, 2}).y == expect, "cisr design y, 2 adders");
    cr.check(design_blocked_spmv(a, support::ones(4), {4, 2, 4}).y == expect, "blocked design y");
    const Stats s = stats(design_cisr_spmv(a, support::ones(4), {2, 1}).trace);
    cr.check(s.padded_slots == 2 && s.utilization == 0.8, "padded 2, utilization 0.8");
    return cr.report();
}

// The combining listing transcribed directly: a running sum keyed by
// current_i, handed off whenever the next machine's row differs.
std::vector<PartialSum> listing(const std::vector<PartialSum>& step) {
    std::vector<PartialSum> out;
    if (step.empty()) return out;
    std::size_t current_i = step[0].row;
    double sum = 0;
    for (const auto& [i, v] : step) {
        if (current_i == i) {
            sum += v;
        } else {
            out.push_back({current_i, sum});
            current_i = i;
            sum = v;
        }
    }
    out.push_back({current_i, sum});
    return out;
}

bool criterion_rewrites() {
    Criterion cr(5, "combine_same_target and combine_maybe_different rewrites");
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t m = 1 + rng() % 8, steps = 1 + rng() % 20, n_rows = 1 + rng() % 10;
        std::vector<std::vector<double>> values(steps);
        std::vector<std::vector<std::size_t>> rows(steps);
        std::vector<std::vector<PartialSum>> tagged(steps);
        std::size_t row = 0;
        for (std::size_t t = 0; t < steps; ++t) {
            if (rng() % 3 == 0) row = std::min(row + 1, n_rows - 1);
            for (std::size_t k = 0; k < m; ++k) {
                const double v = static_cast<int>(rng() % 41) - 20;
                values[t].push_back(v);
                rows[t].push_back(row);
                tagged[t].push_back({row, v});
            }
        }
        std::vector<double> y_same(n_rows, 0.0), y_maybe(n_rows, 0.0), y_seq(n_rows, 0.0);
        const auto same = combine_same_target(values, rows);
        for (std::size_t t = 0; t < steps; ++t) y_same[rows[t][0]] += same[t];
        for (const auto& p : combine_maybe_different(tagged)) y_maybe[p.row] += p.value;
        for (const auto& step : tagged)
            for (const auto& p : step) y_seq[p.row] += p.value;
        cr.check(y_same == y_maybe && y_maybe == y_seq, "coinciding targets, trial " + std::to_string(trial));

        // Mismatch traces: arbitrary rows per machine.
        std::vector<PartialSum> step;
        for (std::size_t k = 0; k < m; ++k)
            step.push_back({rng() % 3, static_cast<double>(static_cast<int>(rng() % 41) - 20)});
        cr.check(combine_maybe_different({step}) == listing(step), "listing semantics, trial " + std::to_string(trial));
        if (m > 1 && std::adjacent_find(step.begin(), step.end(), [](auto& a, auto& b) { return a.row != b.row; }) !=
                         step.end()) {
            std::vector<double> v;
            std::vector<std::size_t> r;
            for (const auto& p : step) {
                v.push_back(p.value);
                r.push_back(p.row);
            }
            bool threw = false;
            try {
                combine_same_target({v}, {r});
            } catch (const Error& e) {
                threw = e.code() == ErrorCode::TargetMismatch;
            }
            cr.check(threw, "same-target rewrite refuses differing rows");
        }
    }
    const std::vector<PartialSum> hand{{4, 1}, {4, 2}, {5, 3}, {4, 4}};
    cr.check(combine_maybe_different({hand}) == std::vector<PartialSum>{{4, 3}, {5, 3}, {4, 4}}, "hand trace");
    return cr.report();
}

// Emitted sums land in a dense y; synthetic rows are dropped.
std::vector<double> scatter(const std::vector<PartialSum>& items, std::size_t n_rows) {
    std::vector<double> y(n_rows, 0.0);
    for (const auto& p : items)
        if (p.row < n_rows) y[p.row] += p.value;
    return y;
}

bool criterion_circuits(const std::vector<Case>& cases) {
    Criterion cr(6, "reduction circuits reproduce sequential per-row sums; thresholds fire exactly");
    for (std::size_t n = 0; n < cases.size(); ++n) {
        const auto& c = cases[n];
        if (!c.integers) continue;
        const auto x = x_for(c, n);
        const auto expect = oracle::dense_spmv(c.grid, x);
        const std::size_t n_rows = c.a.rows();

        // Row-job streams, padding and synthetic rows included.
        const EncodedMatrix e = encode(c.a, cisr_spec(c.machines));
        const auto rows = decode_slot_rows(e);
        std::vector<std::vector<PartialSum>> streams(c.machines);
        for (std::size_t k = 0; k < c.machines; ++k)
            for (std::size_t t = 0; t < e.stream_length; ++t)
                streams[k].push_back({rows[k][t], e.values[k][t] * x[e.col_idx[k][t]]});

        std::vector<PartialSum> isolated;
        for (const auto& s : isolate_reduction(streams)) isolated.insert(isolated.end(), s.begin(), s.end());
        cr.check(scatter(isolated, n_rows) == expect, "isolate_reduction " + c.label);
        cr.check(scatter(fused_accumulator(streams, c.adders, n_rows), n_rows) == expect,
                 "fused_accumulator " + c.label);

        // Block jobs: tree sums, pairing, linear array.
        const std::size_t f = c.k / 2;
        const EncodedMatrix b = encode(c.a, blocked_spec(f, c.machines));
        const auto& rb = std::get<RowBlocks>(b.structure);
        const auto labels = streaming_block_decoder(rb.counts, f, c.machines, c.machines * b.stream_length / f);
        const auto blocks = oracle::blocks_of(c.grid, f, c.machines, x);
        std::vector<std::vector<PartialSum>> steps(b.stream_length / f);
        bool tree_ok = true;
        for (const auto& lab : labels) {
            std::vector<double> lanes;
            for (std::size_t l = 0; l < f; ++l) {
                const std::size_t pos = lab.step * f + l;
                lanes.push_back(b.values[lab.machine][pos] * x[b.col_idx[lab.machine][pos]]);
            }
            const double s = tree_reduce(lanes, tree_levels(f));
            if (lab.block < blocks.size() && s != blocks[lab.block].product_sum) tree_ok = false;
            steps[lab.step].push_back({lab.row, s});
        }
        cr.check(tree_ok, "tree_reduce block sums " + c.label);
        const auto paired = combine_maybe_different(steps);
        for (std::size_t cells : {1, 4})
            cr.check(scatter(linear_array_reduce(paired, cells), n_rows) == expect,
                     "linear_array_reduce cells=" + std::to_string(cells) + " " + c.label);
    }

    for (std::size_t levels = 0; levels <= 6; ++levels) {
        const std::vector<double> at(std::size_t{1} << levels, 1.0), over(at.size() + 1, 1.0);
        bool fits = true, fired = false;
        try {
            fits = tree_reduce(at, levels) == static_cast<double>(at.size());
        } catch (const Error&) {
            fits = false;
        }
        try {
            tree_reduce(over, levels);
        } catch (const Error& e) {
            fired = e.code() == ErrorCode::LevelBudgetExceeded;
        }
        cr.check(fits && fired, "LevelBudgetExceeded threshold at levels=" + std::to_string(levels));
    }
    for (std::size_t cells = 1; cells <= 8; ++cells) {
        std::vector<PartialSum> pending;
        for (std::size_t r = cells; r-- > 0;) pending.push_back({100 + r, 1.0});
        bool fits = true, fired = false;
        try {
            fits = linear_array_reduce(pending, cells).size() == cells;
        } catch (const Error&) {
            fits = false;
        }
        pending.push_back({99, 1.0});
        try {
            linear_array_reduce(pending, cells);
        } catch (const Error& e) {
            fired = e.code() == ErrorCode::CapacityExceeded;
        }
        cr.check(fits && fired, "CapacityExceeded threshold at cells=" + std::to_string(cells));
    }
    return cr.report();
}

bool criterion_properties(const std::vector<Case>& cases) {
    Criterion cr(7, "continuity and distinctness hold under CISR row jobs; shuffled streams fail both");
    for (const auto& c : cases) {
        const EncodedMatrix e = encode(c.a, cisr_spec(c.machines));
        const auto rows = decode_slot_rows(e);
        bool continuous = true;
        for (const auto& s : rows) continuous = continuous && check_continuous(s);
        cr.check(continuous, "continuous " + c.label);
        cr.check(check_distinct(rows, c.a.rows()), "distinct " + c.label);
    }

    // Swap the second slot of machine 0 with the first slot of machine 1:
    // machine 0 revisits row 0 after row 1, and both machines hit row 0 at
    // step 0.
    const EncodedMatrix f = encode(support::fixture(), cisr_spec(2));
    auto shuffled = decode_slot_rows(f);
    std::swap(shuffled[0][1], shuffled[1][0]);
    cr.check(!check_continuous(shuffled[0]), "shuffled fixture stream is discontinuous");
    cr.check(!check_distinct(shuffled, 4), "shuffled fixture streams collide");

    std::size_t shuffles = 0;
    for (const auto& c : cases) {
        if (c.machines < 2) continue;
        const EncodedMatrix e = encode(c.a, cisr_spec(c.machines));
        auto rows = decode_slot_rows(e);
        // Need a machine-0 stream with two distinct real rows and a
        // machine-1 stream long enough to receive the displaced slot.
        const auto& s0 = rows[0];
        std::size_t second = 0;
        while (second < s0.size() && s0[second] == s0[0]) ++second;
        if (second == s0.size() || s0[second] >= c.a.rows() || rows[1].empty()) continue;
        // Repeat machine 0's first row after its second row, and give
        // machine 1 that same row at step `second`.
        if (second + 1 >= s0.size()) continue;
        const std::size_t first_row = s0[0];
        rows[0][second + 1] = first_row;
        rows[1][second + 1] = first_row;
        cr.check(!check_continuous(rows[0]), "shuffled stream discontinuous " + c.label);
        cr.check(!check_distinct(rows, c.a.rows()), "shuffled streams collide " + c.label);
        ++shuffles;
    }
    cr.note(std::to_string(shuffles + 1) + " deliberately shuffled traces");
    return cr.report();
}

std::string run_cli(const std::string& args, const std::filesystem::path& dir, const std::string& tag, int& code) {
    const auto out = dir / (tag + ".out");
    const std::string cmd = std::string("\"") + SPARSESPACE_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + (dir / (tag + ".err")).string() + "\"";
    code = std::system(cmd.c_str());
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf() << "\n--stderr--\n";
    std::ifstream er(dir / (tag + ".err"), std::ios::binary);
    ss << er.rdbuf();
    return ss.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_determinism() {
    Criterion cr(8, "repeated CLI invocations produce byte-identical outputs and traces");
    const auto dir = std::filesystem::temp_directory_path() / "sparsespace-acceptance";
    std::filesystem::create_directories(dir);
    const std::string fx = support::data_path("fixture.mtx");
    const auto enc = (dir / "enc.json").string();
    struct Command {
        std::string tag, args;
        int exit_code = 0;
    };
    const std::vector<Command> commands{
        {"encode", "encode \"" + fx + "\" --design cisr -m 3"},
        {"encode-blocked", "encode \"" + fx + "\" --design blocked -m 2 -k 4 -o \"" + enc + "\""},
        {"decode", "decode \"" + enc + "\""},
        {"spmv", "spmv \"" + fx + "\" --seed 5 --design blocked --format json --verify"},
        {"inspect", "inspect \"" + fx + "\" -m 4"},
        {"bench", "bench --rows 24 --cols 24 -m 1,2,4 -k 2,4 --jobs 2"},
        {"mismatch", "spmv \"" + fx + "\" --ones --verify --inject-fault 1", 2},
        {"bad-input", "spmv \"" + support::data_path("malformed.mtx") + "\" --ones", 1},
    };
    for (const auto& [tag, args, expected] : commands) {
        int c1 = 0, c2 = 0;
        const std::string a = run_cli(args, dir, tag + "-1", c1);
        const std::string enc_first = slurp(enc);
        const std::string b = run_cli(args, dir, tag + "-2", c2);
        cr.check(WIFEXITED(c1) && WEXITSTATUS(c1) == expected && c1 == c2, tag + " exit status");
        cr.check(a == b, tag + " output identical");
        cr.check(enc_first == slurp(enc), tag + " written file identical");
    }
    for (const std::string design : {"cisr", "blocked"}) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            const auto tag = design + "-trace-" + std::to_string(rep);
            const auto t = dir / (tag + ".events.csv"), r = dir / (tag + ".reductions.csv"), s = dir / (tag + ".stats.json");
            int code = 0;
            run_cli("spmv \"" + fx + "\" --ones --design " + design + " --trace \"" + t.string() + "\" --reductions \"" +
                        r.string() + "\" --stats \"" + s.string() + "\"",
                    dir, tag, code);
            cr.check(code == 0, tag + " exits 0");
            const std::string all = slurp(t) + slurp(r) + slurp(s);
            if (rep == 0)
                first = all;
            else
                cr.check(all == first, design + " traces identical");
        }
    }
    return cr.report();
}

bool criterion_edges() {
    Criterion cr(9, "edge cases: zero matrix, single row/column, m > rows, empty rows, odd block totals");
    struct Edge {
        std::string name;
        oracle::Grid grid;
    };
    std::vector<Edge> edges;
    edges.push_back({"all-zero", oracle::Grid(5, std::vector<double>(7, 0.0))});
    edges.push_back({"single row", {{3, 0, 1, 2, 0, 5, 4, 0, 1}}});
    edges.push_back({"single column", {{1}, {0}, {2}, {0}, {3}}});
    edges.push_back({"1x1", {{7}}});
    edges.push_back({"more machines than rows", {{1, 2}, {0, 3}}});
    {
        oracle::Grid g(12, std::vector<double>(10, 0.0));
        for (std::size_t i = 0; i < 12; i += 3)
            for (std::size_t j = 0; j < 10; ++j) g[i][j] = static_cast<double>(i + j + 1);
        edges.push_back({"empty rows between dense rows", g});
    }
    edges.push_back({"odd block total", {{1, 2, 3}, {4, 5, 6}, {0, 7, 0}}});
    edges.push_back({"trailing empty rows", {{1, 1}, {0, 0}, {0, 0}}});

    for (const auto& edge : edges) {
        const auto a = support::to_dense(edge.grid);
        const auto x = oracle::random_x(a.cols(), 17, true);
        const auto ref = oracle::dense_spmv(edge.grid, x);
        for (std::size_t m : {1, 2, 3, 4, 8}) {
            const std::string tag = edge.name + " m=" + std::to_string(m);
            for (const auto& spec : {cisr_spec(m), blocked_spec(1, m), blocked_spec(2, m), blocked_spec(4, m)}) {
                const EncodedMatrix e = encode(a, spec);
                cr.check(decode(e) == a, tag + " roundtrip " + spec.name);
                cr.check(decoder_matches(decode_slot_rows(e), e), tag + " decoder " + spec.name);
                cr.check(verify_integrity(e).ok(), tag + " integrity " + spec.name);
            }
            cr.check(design_cisr_spmv(a, x, {m, 1}).y == ref, tag + " cisr y");
            cr.check(design_cisr_spmv(a, x, {m, m}).y == ref, tag + " cisr y, m adders");
            for (std::size_t k : {2, 4, 8})
                cr.check(design_blocked_spmv(a, x, {k, m, 4}).y == ref, tag + " blocked k=" + std::to_string(k));
        }
    }
    // Odd block totals force zeroed padding blocks on the last step.
    const EncodedMatrix odd = encode(support::to_dense(edges[6].grid), blocked_spec(2, 2));
    const auto& rb = std::get<RowBlocks>(odd.structure);
    const std::size_t real = std::accumulate(rb.counts.begin(), rb.counts.end(), std::size_t{0});
    cr.check(real % 2 == 1 && odd.machines * odd.stream_length / 2 == real + 1, "odd total padded by one block");
    return cr.report();
}

}  // namespace

int main() {
    const auto cases = envelope();
    std::vector<bool> results;
    results.push_back(criterion_roundtrip(cases));
    results.push_back(criterion_oracle(cases));
    results.push_back(criterion_decoders(cases));
    results.push_back(criterion_fixture());
    results.push_back(criterion_rewrites());
    results.push_back(criterion_circuits(cases));
    results.push_back(criterion_properties(cases));
    results.push_back(criterion_determinism());
    results.push_back(criterion_edges());
    const auto passed = static_cast<std::size_t>(std::count(results.begin(), results.end(), true));
    std::cout << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? EXIT_SUCCESS : EXIT_FAILURE;
}
