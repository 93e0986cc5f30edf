#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace see {

/// Row-major dense matrix of doubles.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }

    std::size_t scalar_count() const { return rows * cols; }

    bool operator==(const DenseMatrix&) const = default;
};

// Versioned binary container ("SEEM"). All in-memory math stays in doubles;
// float32 is a storage-only mode, so the f64 round trip is bit-exact and the
// f32 round trip reproduces the narrowed values.
void write_matrix(std::ostream& os, const DenseMatrix& m, bool as_float32 = false);
DenseMatrix read_matrix(std::istream& is);
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m,
                       bool as_float32 = false);
DenseMatrix read_matrix_file(const std::filesystem::path& path);

}  // namespace see
