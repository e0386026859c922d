#pragma once

// Little-endian scalar I/O shared by the path and trajectory file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace spde::io {

inline void write_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k)
        b[k] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t read_u64_le(std::istream& in) {
    unsigned char b[8] = {};
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
        v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return v;
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int k = 0; k < 4; ++k)
        b[k] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4] = {};
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
        v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
    return v;
}

inline void write_f64(std::ostream& out, double v) { write_u64_le(out, std::bit_cast<std::uint64_t>(v)); }

inline double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64_le(in)); }

}  // namespace spde::io
