#include "varsketch/io.hpp"

#include <bit>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "array serialization assumes a little-endian host");

namespace varsketch {
namespace {

void write_header(const std::filesystem::path& base, const std::vector<std::size_t>& dims,
                  const char* dtype) {
    std::filesystem::path p = base;
    p += ".hdr";
    std::ofstream f(p);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    f << "dims:";
    for (std::size_t d : dims) f << " " << d;
    f << "\n";
    f << "dtype: " << dtype << "\n";
    f << "order: row-major\n";
    if (!f) throw IoError("write failed: " + p.string());
}

void write_payload(const std::filesystem::path& base, const double* data, std::size_t count) {
    std::filesystem::path p = base;
    p += ".bin";
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    f.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!f) throw IoError("write failed: " + p.string());
}

std::vector<double> read_payload(const std::filesystem::path& base, std::size_t count) {
    std::filesystem::path p = base;
    p += ".bin";
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open " + p.string());
    std::vector<double> buf(count);
    f.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
    if (f.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
        throw IoError("short read: " + p.string());
    return buf;
}

} // namespace

void write_array(const std::filesystem::path& base, const ComplexArray& a) {
    write_header(base, a.shape(), "complex128");
    // std::complex<double> is layout-compatible with double[2]
    write_payload(base, reinterpret_cast<const double*>(a.data()), a.size() * 2);
}

void write_array(const std::filesystem::path& base, const RealArray& a) {
    write_header(base, a.shape(), "float64");
    write_payload(base, a.data(), a.size());
}

ArrayHeader read_array_header(const std::filesystem::path& base) {
    std::filesystem::path p = base;
    p += ".hdr";
    std::ifstream f(p);
    if (!f) throw IoError("cannot open " + p.string());
    ArrayHeader h;
    std::string line;
    std::string order;
    while (std::getline(f, line)) {
        std::istringstream is(line);
        std::string key;
        is >> key;
        if (key == "dims:") {
            std::size_t d;
            while (is >> d) h.dims.push_back(d);
        } else if (key == "dtype:") {
            is >> h.dtype;
        } else if (key == "order:") {
            is >> order;
        }
    }
    if (h.dims.empty() || h.dtype.empty())
        throw IoError("malformed array header: " + p.string());
    if (!order.empty() && order != "row-major")
        throw IoError("unsupported element order '" + order + "' in " + p.string());
    return h;
}

ComplexArray read_complex_array(const std::filesystem::path& base) {
    ArrayHeader h = read_array_header(base);
    if (h.dtype != "complex128")
        throw IoError("expected complex128 data at " + base.string() + ", found " + h.dtype);
    const std::size_t n = detail::shape_product(h.dims);
    std::vector<double> buf = read_payload(base, n * 2);
    std::vector<cplx> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = cplx(buf[2 * i], buf[2 * i + 1]);
    return ComplexArray(h.dims, std::move(data));
}

RealArray read_real_array(const std::filesystem::path& base) {
    ArrayHeader h = read_array_header(base);
    if (h.dtype != "float64")
        throw IoError("expected float64 data at " + base.string() + ", found " + h.dtype);
    const std::size_t n = detail::shape_product(h.dims);
    return RealArray(h.dims, read_payload(base, n));
}

void write_kv(const std::filesystem::path& path, const KvPairs& kv) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& [k, v] : kv) f << k << ": " << v << "\n";
    if (!f) throw IoError("write failed: " + path.string());
}

KvPairs read_kv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    KvPairs kv;
    std::string line;
    while (std::getline(f, line)) {
        const auto pos = line.find(": ");
        if (pos == std::string::npos) continue;
        kv.emplace_back(line.substr(0, pos), line.substr(pos + 2));
    }
    return kv;
}

void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<std::uint8_t>& gray) {
    if (gray.size() != rows * cols) throw ShapeMismatch("write_pgm: pixel count mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "P5\n" << cols << " " << rows << "\n255\n";
    f.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

void write_ppm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != rows * cols * 3) throw ShapeMismatch("write_ppm: pixel count mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "P6\n" << cols << " " << rows << "\n255\n";
    f.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

} // namespace varsketch
