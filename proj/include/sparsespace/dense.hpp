#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sparsespace {

using DenseVector = std::vector<double>;

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;

    bool operator==(const Triplet&) const = default;
};

// Ground-truth 2-D storage, row-major, zeros stored explicitly.
class DenseMatrix {
public:
    // All-zero matrix. Both dimensions must be at least 1.
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

    // Bounds-checked access; throws ErrorCode::OutOfBounds.
    double at(std::size_t i, std::size_t j) const;

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(values_).subspan(i * cols_, cols_);
    }

    std::size_t nnz() const noexcept;
    std::vector<std::size_t> row_lengths() const;
    // Nonzeros in row-major order.
    std::vector<Triplet> nonzeros() const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

DenseMatrix dense_from_triplets(std::size_t rows, std::size_t cols, std::span<const Triplet> entries);

// SmallIntegers draws each nonzero uniformly from {1, ..., 9}, so every sum
// is exact regardless of association. UniformReal draws from [0.5, 1.5).
enum class ValueDistribution { SmallIntegers, UniformReal };

// Each cell is nonzero independently with probability `density`. The
// generator is std::mt19937_64 seeded with `seed`; a cell consumes one draw
// for the Bernoulli trial ((draw >> 11) * 2^-53 < density) and, when nonzero,
// one more for its value. Output is identical on every platform.
DenseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, std::uint64_t seed,
                          ValueDistribution dist = ValueDistribution::SmallIntegers);

// Structure-driven SpMV: y(i) = sum over j of A(i, j) * x(j), ascending j.
DenseVector spmv_oracle(const DenseMatrix& a, std::span<const double> x);

bool all_integral(std::span<const double> values) noexcept;

// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace sparsespace
