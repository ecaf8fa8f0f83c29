#include <doctest.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

#include "support.hpp"

using namespace sparsespace;

namespace {

const RowLengths& row_len(const EncodedMatrix& e) { return std::get<RowLengths>(e.structure); }

}  // namespace

TEST_CASE("shipped specs validate") {
    for (std::size_t m : {1, 2, 8}) {
        CHECK(validate_spec(cisr_spec(m)).ok());
        CHECK(validate_spec(blocked_spec(2, m)).ok());
    }
}

TEST_CASE("malformed specs are reported") {
    RepresentationSpec s = cisr_spec(2);
    std::swap(s.steps[0], s.steps[1]);
    CHECK_FALSE(validate_spec(s).ok());

    RepresentationSpec no_sched{"x", {PackStep{}}};
    CHECK_FALSE(validate_spec(no_sched).ok());

    RepresentationSpec zero = cisr_spec(0);
    CHECK_FALSE(validate_spec(zero).ok());
    CHECK_THROWS_AS(encode(support::fixture(), zero), Error);

    RepresentationSpec blk = blocked_spec(0, 2);
    CHECK_FALSE(validate_spec(blk).ok());

    RepresentationSpec wrong_dim = cisr_spec(2);
    std::get<ScheduleStep>(wrong_dim.steps[1]).dim = Dim::Blocks;
    CHECK_FALSE(validate_spec(wrong_dim).ok());

    RepresentationSpec two_packs{"x", {PackStep{}, PackStep{}, ScheduleStep{}}};
    CHECK_FALSE(validate_spec(two_packs).ok());

    try {
        encode(support::fixture(), two_packs);
        FAIL("expected InvalidSpec");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidSpec);
    }
}

TEST_CASE("pack columns yields CSR of the fixture") {
    const PackedMatrix p = pack(support::fixture(), Dim::Columns);
    CHECK(p.lengths() == std::vector<std::size_t>{3, 1, 2, 2});
    CHECK(p.lines[0].slots[2].index == 3);
    CHECK(p.lines[3].slots[0].value == 7);
    const PackedMatrix q = pack(support::fixture(), Dim::Rows);
    CHECK(q.lengths() == std::vector<std::size_t>{2, 2, 2, 2});
    CHECK(q.lines[3].slots[1].index == 2);
}

TEST_CASE("block splits rows and zero-pads the last block") {
    const BlockedMatrix b = block(pack(support::fixture(), Dim::Columns), 2);
    CHECK(b.row_blocks == std::vector<std::size_t>{2, 1, 1, 1});
    CHECK(b.blocks.size() == 5);
    CHECK(b.padded_slots() == 2);
    CHECK_FALSE(b.blocks[1].slots[1].origin.has_value());
    CHECK(b.blocks[1].slots[1].value == 0.0);
    CHECK(b.blocks[1].slots[0].index == 3);
    CHECK_THROWS_AS(block(pack(support::fixture(), Dim::Columns), 0), Error);
}

TEST_CASE("fixture schedule on two machines matches the worked example") {
    const EncodedMatrix e = encode(support::fixture(), cisr_spec(2));
    CHECK(e.stream_length == 5);
    CHECK(e.values[0] == std::vector<double>{1, 2, 3, 7, 8});
    CHECK(e.col_idx[0] == std::vector<std::size_t>{0, 1, 3, 1, 2});
    CHECK(e.values[1] == std::vector<double>{4, 5, 6, 0, 0});
    CHECK(e.col_idx[1] == std::vector<std::size_t>{2, 0, 3, 0, 0});
    CHECK(row_len(e).per_machine[0] == std::vector<std::size_t>{3, 2});
    CHECK(row_len(e).per_machine[1] == std::vector<std::size_t>{1, 4});
    CHECK(e.padded_slots() == 2);
    CHECK(e.nnz() == 8);
    CHECK(e.spec == cisr_spec(2));
    CHECK(oracle::greedy_schedule({3, 1, 2, 2}, 2) == std::vector<std::size_t>{0, 1, 1, 0});
}

TEST_CASE("asap assignment equals the linear-scan greedy scheduler") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 1 + rng() % 9;
        std::vector<std::size_t> jobs(rng() % 60);
        for (auto& j : jobs) j = rng() % 12;
        CHECK(asap_assignment(jobs, m) == oracle::greedy_schedule(jobs, m));
    }
    CHECK_THROWS_AS(asap_assignment(std::vector<std::size_t>{1}, 0), Error);
}

TEST_CASE("cisr encoding equals the oracle streams (property)") {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const std::size_t rows = 1 + seed % 23, cols = 1 + (seed * 7) % 19;
        const double density = std::array{0.01, 0.05, 0.2, 0.5}[seed % 4];
        const std::size_t m = std::array<std::size_t, 5>{1, 2, 3, 4, 8}[seed % 5];
        const auto g = oracle::random_grid(rows, cols, density, seed, true);
        const auto ex = oracle::cisr_expectation(g, m);
        const EncodedMatrix e = encode(support::to_dense(g), cisr_spec(m));
        REQUIRE(e.stream_length == ex.stream_length);
        for (std::size_t k = 0; k < m; ++k) {
            CHECK(e.values[k] == ex.machines[k].values);
            CHECK(e.col_idx[k] == ex.machines[k].cols);
            CHECK(row_len(e).per_machine[k] == ex.row_len[k]);
            for (std::size_t t = 0; t < e.stream_length; ++t) {
                const auto& o = e.provenance[k][t];
                CHECK(o.has_value() == ex.machines[k].rows[t].has_value());
                if (o) CHECK(o->row == *ex.machines[k].rows[t]);
            }
        }
    }
}

TEST_CASE("greedy stream length stays within the list-scheduling bound") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const auto g = oracle::random_grid(1 + seed % 40, 1 + seed % 31, 0.2, seed, true);
        const std::size_t m = 1 + seed % 6;
        const auto a = support::to_dense(g);
        const auto lens = a.row_lengths();
        const std::size_t total = std::accumulate(lens.begin(), lens.end(), std::size_t{0});
        const std::size_t longest = *std::max_element(lens.begin(), lens.end());
        if (longest == 0) continue;
        const EncodedMatrix e = encode(a, cisr_spec(m));
        CHECK(e.stream_length * m >= total);
        CHECK(e.stream_length <= total / m + longest);
        CHECK(e.padded_slots() == m * e.stream_length - total);
    }
}

TEST_CASE("more machines than rows leaves all-padding machines") {
    const DenseMatrix a(2, 3, {1, 0, 2, 0, 3, 0});
    const EncodedMatrix e = encode(a, cisr_spec(4));
    CHECK(e.stream_length == 2);
    CHECK(row_len(e).per_machine[2] == std::vector<std::size_t>{2});
    CHECK(row_len(e).per_machine[3] == std::vector<std::size_t>{2});
    CHECK(e.values[3] == std::vector<double>{0, 0});
}

TEST_CASE("all-zero matrix encodes to empty streams") {
    const EncodedMatrix e = encode(DenseMatrix(3, 3), cisr_spec(2));
    CHECK(e.stream_length == 0);
    CHECK(row_len(e).per_machine[0] == std::vector<std::size_t>{0, 0, 0});
    CHECK(row_len(e).per_machine[1] == std::vector<std::size_t>{0});
    const EncodedMatrix b = encode(DenseMatrix(3, 3), blocked_spec(2, 2));
    CHECK(b.stream_length == 0);
    CHECK(std::get<RowBlocks>(b.structure).counts == std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("blocked encoding places blocks round-robin with zeroed padding blocks") {
    const EncodedMatrix e = encode(support::fixture(), blocked_spec(2, 2));
    CHECK(e.stream_length == 6);
    CHECK(e.values[0] == std::vector<double>{1, 2, 4, 0, 7, 8});
    CHECK(e.values[1] == std::vector<double>{3, 0, 5, 6, 0, 0});
    CHECK(std::get<RowBlocks>(e.structure).counts == std::vector<std::size_t>{2, 1, 1, 1});
    CHECK(e.padded_slots() == 4);

    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto g = oracle::random_grid(1 + seed % 21, 1 + seed % 17, 0.3, seed, true);
        const std::size_t f = std::array<std::size_t, 3>{1, 2, 4}[seed % 3];
        const std::size_t m = 1 + seed % 5;
        const auto blocks = oracle::blocks_of(g, f, m, {});
        const EncodedMatrix b = encode(support::to_dense(g), blocked_spec(f, m));
        const std::size_t steps = (blocks.size() + m - 1) / m;
        REQUIRE(b.stream_length == steps * f);
        for (const auto& blk : blocks) {
            for (std::size_t l = 0; l < f; ++l) {
                CHECK(b.values[blk.machine][blk.step * f + l] == blk.values[l]);
                CHECK(b.col_idx[blk.machine][blk.step * f + l] == blk.cols[l]);
            }
        }
    }
}

TEST_CASE("encoded JSON round-trips exactly") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto a = random_sparse(1 + seed % 11, 1 + seed % 9, 0.3, seed, ValueDistribution::UniformReal);
        const auto spec = seed % 2 ? cisr_spec(1 + seed % 4) : blocked_spec(1 + seed % 3, 1 + seed % 4);
        const EncodedMatrix e = encode(a, spec);
        CHECK(encoded_from_json(encoded_to_json(e)) == e);
        CHECK(encoded_from_json(encoded_to_json(e, 2)) == e);
    }
    CHECK(spec_from_json(spec_to_json(blocked_spec(3, 2))) == blocked_spec(3, 2));
}

TEST_CASE("schema errors are reported") {
    auto code = [](std::string_view text) {
        try {
            encoded_from_json(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code("not json") == ErrorCode::SchemaError);
    CHECK(code("{}") == ErrorCode::SchemaError);
    CHECK(code(R"({"format":"other"})") == ErrorCode::SchemaError);
    std::string good = encoded_to_json(encode(support::fixture(), cisr_spec(2)));
    std::string broken = good;
    broken.replace(broken.find("\"stream_length\":5"), 17, "\"stream_length\":6");
    CHECK(code(broken) == ErrorCode::SchemaError);
}

TEST_CASE("golden fixture encoding file matches") {
    std::ifstream in(support::data_path("fixture_cisr_m2.json"));
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(encoded_from_json(ss.str()) == encode(support::fixture(), cisr_spec(2)));
}
