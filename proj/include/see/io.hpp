#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

// Little-endian binary primitives shared by the versioned file formats.

namespace see::io {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os) throw std::runtime_error("write failed");
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw std::runtime_error("unexpected end of file");
}

template <typename T>
void write_le(std::ostream& os, T v) {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
    write_bytes(os, buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    read_bytes(is, buf, sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
    return static_cast<T>(u);
}

inline void write_f64(std::ostream& os, double v) {
    write_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
}

inline double read_f64(std::istream& is) {
    return std::bit_cast<double>(read_le<std::uint64_t>(is));
}

inline void write_f32(std::ostream& os, float v) {
    write_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(v));
}

inline float read_f32(std::istream& is) {
    return std::bit_cast<float>(read_le<std::uint32_t>(is));
}

inline void write_str(std::ostream& os, const std::string& s) {
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    write_bytes(os, s.data(), s.size());
}

inline std::string read_str(std::istream& is) {
    const auto n = read_le<std::uint32_t>(is);
    std::string s(n, '\0');
    if (n > 0) read_bytes(is, s.data(), n);
    return s;
}

inline void write_magic(std::ostream& os, const char (&magic)[5]) {
    write_bytes(os, magic, 4);
}

inline void expect_magic(std::istream& is, const char (&magic)[5], const char* what) {
    char buf[4];
    read_bytes(is, buf, 4);
    if (std::memcmp(buf, magic, 4) != 0)
        throw std::runtime_error(std::string(what) + ": bad magic");
}

}  // namespace see::io
