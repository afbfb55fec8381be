#pragma once

// On-disk array format: a two-file pair sharing a base path.
//
//   <base>.hdr   text header, one field per line:
//                    dims: <d0> <d1> ...
//                    dtype: complex128 | float64
//                    order: row-major
//   <base>.bin   raw little-endian 8-byte doubles; complex data is
//                interleaved (re, im) per element.
//
// Sidecars and manifests are plain "key: value" text files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "varsketch/array.hpp"

namespace varsketch {

struct ArrayHeader {
    std::vector<std::size_t> dims;
    std::string dtype; // "complex128" or "float64"
};

void write_array(const std::filesystem::path& base, const ComplexArray& a);
void write_array(const std::filesystem::path& base, const RealArray& a);

ArrayHeader read_array_header(const std::filesystem::path& base);
ComplexArray read_complex_array(const std::filesystem::path& base);
RealArray read_real_array(const std::filesystem::path& base);

// Ordered key/value text files (sidecars, manifests).
using KvPairs = std::vector<std::pair<std::string, std::string>>;
void write_kv(const std::filesystem::path& path, const KvPairs& kv);
KvPairs read_kv(const std::filesystem::path& path);

// 8-bit grayscale PGM (P5) / color PPM (P6) emitters for the render
// subcommand.  pixels are row-major; rgb is 3 bytes per pixel.
void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<std::uint8_t>& gray);
void write_ppm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<std::uint8_t>& rgb);

} // namespace varsketch
