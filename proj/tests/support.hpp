#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sparsespace/sparsespace.hpp"

namespace support {

inline sparsespace::DenseMatrix to_dense(const oracle::Grid& g) {
    sparsespace::DenseMatrix a(g.size(), g.front().size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g[i].size(); ++j) a(i, j) = g[i][j];
    return a;
}

inline sparsespace::DenseMatrix fixture() { return to_dense(oracle::fixture()); }

inline std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// Exact for integral data; otherwise relative to |ref| per component.
inline bool close_enough(const std::vector<double>& y, const std::vector<double>& ref, bool exact) {
    if (y.size() != ref.size()) return false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (exact ? y[i] != ref[i] : std::abs(y[i] - ref[i]) > 1e-6 * std::abs(ref[i])) return false;
    }
    return true;
}

inline std::string data_path(const std::string& name) { return std::string(SPARSESPACE_TEST_DATA) + "/" + name; }

inline sparsespace::DenseMatrix read_fixture() { return sparsespace::read_matrix_market(data_path("fixture.mtx")); }

}  // namespace support
