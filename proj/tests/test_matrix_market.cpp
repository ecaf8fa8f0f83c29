#include <doctest.h>

#include "support.hpp"

using namespace sparsespace;

namespace {

std::string error_text(std::string_view text, ErrorCode expected) {
    try {
        parse_matrix_market(text);
    } catch (const Error& e) {
        CHECK(e.code() == expected);
        return e.what();
    }
    FAIL("expected a parse error");
    return {};
}

}  // namespace

TEST_CASE("fixture file parses to the fixture matrix") {
    CHECK(read_matrix_market(support::data_path("fixture.mtx")) == support::fixture());
    CHECK(read_matrix_market(support::data_path("zero.mtx")).nnz() == 0);
}

TEST_CASE("comments and blank lines are skipped") {
    const auto a = parse_matrix_market(
        "%%MatrixMarket matrix coordinate real general\n% a comment\n\n2 2 1\n% another\n2 1 3.5\n");
    CHECK(a.rows() == 2);
    CHECK(a(1, 0) == 3.5);
}

TEST_CASE("write then parse is lossless") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = random_sparse(1 + seed % 9, 1 + seed % 7, 0.4, seed, ValueDistribution::UniformReal);
        CHECK(parse_matrix_market(to_matrix_market(a)) == a);
    }
    CHECK(to_matrix_market(DenseMatrix(2, 3)) == "%%MatrixMarket matrix coordinate real general\n2 3 0\n");
}

TEST_CASE("malformed input names the line") {
    CHECK(error_text("", ErrorCode::MalformedHeader).find("line") != std::string::npos);
    error_text("%%MatrixMarket matrix array real general\n2 2\n", ErrorCode::UnsupportedKind);
    error_text("%%MatrixMarket matrix coordinate real symmetric\n2 2 0\n", ErrorCode::UnsupportedKind);
    error_text("%%MatrixMarket matrix coordinate real general\n2 x 0\n", ErrorCode::MalformedHeader);
    const std::string bad_entry = error_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 2 zz\n",
                                             ErrorCode::MalformedEntry);
    CHECK(bad_entry.find("line 4") != std::string::npos);
    error_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n", ErrorCode::MalformedEntry);
    const std::string oob = error_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
                                       ErrorCode::IndexOutOfDeclaredBounds);
    CHECK(oob.find("line 3") != std::string::npos);
    error_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n", ErrorCode::IndexOutOfDeclaredBounds);
    error_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n", ErrorCode::DuplicateEntry);
}

TEST_CASE("missing file is an error") {
    CHECK_THROWS_AS(read_matrix_market(support::data_path("does-not-exist.mtx")), Error);
}
