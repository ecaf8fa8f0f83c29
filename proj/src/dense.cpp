#include "sparsespace/dense.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "sparsespace/error.hpp"

namespace sparsespace {

namespace {

std::string coord_text(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be at least 1x1, got " +
                                                    std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (values_.size() != rows_ * cols_) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(rows_ * cols_) +
                                                      " values, got " + std::to_string(values_.size()));
    }
}

double DenseMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
        throw Error(ErrorCode::OutOfBounds, coord_text(i, j) + " outside " + std::to_string(rows_) + "x" +
                                                std::to_string(cols_));
    }
    return (*this)(i, j);
}

std::size_t DenseMatrix::nnz() const noexcept {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

std::vector<std::size_t> DenseMatrix::row_lengths() const {
    std::vector<std::size_t> lengths(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
        auto r = row(i);
        lengths[i] = static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](double v) { return v != 0.0; }));
    }
    return lengths;
}

std::vector<Triplet> DenseMatrix::nonzeros() const {
    std::vector<Triplet> out;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            if (double v = (*this)(i, j); v != 0.0) out.push_back({i, j, v});
        }
    }
    return out;
}

DenseMatrix dense_from_triplets(std::size_t rows, std::size_t cols, std::span<const Triplet> entries) {
    DenseMatrix a(rows, cols);
    std::vector<bool> seen(rows * cols, false);
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw Error(ErrorCode::OutOfBounds, "entry " + coord_text(t.row, t.col) + " outside " +
                                                    std::to_string(rows) + "x" + std::to_string(cols));
        }
        const std::size_t flat = t.row * cols + t.col;
        if (seen[flat]) throw Error(ErrorCode::DuplicateEntry, "entry " + coord_text(t.row, t.col) + " listed twice");
        seen[flat] = true;
        a(t.row, t.col) = t.value;
    }
    return a;
}

DenseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, std::uint64_t seed,
                          ValueDistribution dist) {
    if (!(density >= 0.0 && density <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "density must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!(unit() < density)) continue;
            if (dist == ValueDistribution::SmallIntegers) {
                a(i, j) = static_cast<double>(1 + rng() % 9);
            } else {
                a(i, j) = 0.5 + unit();
            }
        }
    }
    return a;
}

DenseVector spmv_oracle(const DenseMatrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "x has length " + std::to_string(x.size()) + ", matrix has " +
                                                      std::to_string(a.cols()) + " columns");
    }
    DenseVector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * x[j];
        y[i] = sum;
    }
    return y;
}

bool all_integral(std::span<const double> values) noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v) && v == std::trunc(v); });
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace sparsespace
