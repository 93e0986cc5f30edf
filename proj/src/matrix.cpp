#include "see/matrix.hpp"

#include <fstream>
#include <stdexcept>

#include "see/io.hpp"

namespace see {

namespace {
constexpr char kMagic[5] = "SEEM";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_matrix(std::ostream& os, const DenseMatrix& m, bool as_float32) {
    io::write_magic(os, kMagic);
    io::write_le<std::uint32_t>(os, kVersion);
    io::write_le<std::uint8_t>(os, as_float32 ? 1 : 0);
    io::write_le<std::uint64_t>(os, m.rows);
    io::write_le<std::uint64_t>(os, m.cols);
    if (as_float32) {
        for (double v : m.data) io::write_f32(os, static_cast<float>(v));
    } else {
        for (double v : m.data) io::write_f64(os, v);
    }
}

DenseMatrix read_matrix(std::istream& is) {
    io::expect_magic(is, kMagic, "matrix file");
    const auto version = io::read_le<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("matrix file: unsupported version " + std::to_string(version));
    const auto dtype = io::read_le<std::uint8_t>(is);
    if (dtype > 1) throw std::runtime_error("matrix file: unknown storage type");
    DenseMatrix m;
    m.rows = io::read_le<std::uint64_t>(is);
    m.cols = io::read_le<std::uint64_t>(is);
    m.data.resize(m.rows * m.cols);
    if (dtype == 1) {
        for (double& v : m.data) v = io::read_f32(is);
    } else {
        for (double& v : m.data) v = io::read_f64(is);
    }
    return m;
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m,
                       bool as_float32) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_matrix(os, m, as_float32);
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return read_matrix(is);
}

}  // namespace see
