#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sparsespace/dense.hpp"

namespace sparsespace {

// Only "%%MatrixMarket matrix coordinate real general" is accepted. Indices
// are 1-based in the file. Errors name the offending line.
DenseMatrix parse_matrix_market(std::istream& in);
DenseMatrix parse_matrix_market(std::string_view text);
DenseMatrix read_matrix_market(const std::filesystem::path& path);

// Nonzeros in row-major order; values use the shortest round-trip decimal form.
void write_matrix_market(std::ostream& out, const DenseMatrix& a);
std::string to_matrix_market(const DenseMatrix& a);

}  // namespace sparsespace
