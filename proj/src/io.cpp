#include "dualgrid/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dualgrid {

namespace {

constexpr char kMagic[4] = {'D', 'X', 'S', 'G'};
constexpr uint16_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, size_t& offset, const char* what) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw std::runtime_error("load_sinogram: truncated while reading " + std::string(what) +
                                 " at byte offset " + std::to_string(offset));
    offset += sizeof(T);
    return v;
}

void write_be32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void png_chunk(std::ostream& os, const char type[4], const std::vector<uint8_t>& data) {
    std::vector<uint8_t> buf;
    write_be32(buf, static_cast<uint32_t>(data.size()));
    buf.insert(buf.end(), type, type + 4);
    buf.insert(buf.end(), data.begin(), data.end());
    uint32_t crc = crc32(0L, buf.data() + 4, static_cast<uInt>(buf.size() - 4));
    write_be32(buf, crc);
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<uint16_t> normalize_u16(const ImageGrid& img, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (double v : img.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<uint16_t> out(img.size(), 0);
    if (hi > lo) {
        const double scale = 65535.0 / (hi - lo);
        for (size_t i = 0; i < img.size(); ++i)
            out[i] = static_cast<uint16_t>(std::lround((img.values[i] - lo) * scale));
    }
    return out;
}

void write_scale_sidecar(const std::filesystem::path& path, double lo, double hi) {
    std::filesystem::path side = path;
    side += ".scale.txt";
    std::ofstream os(side);
    if (!os) throw std::runtime_error("save_image: cannot write " + side.string());
    os << "min=" << format_g17(lo) << " max=" << format_g17(hi) << "\n";
}

}  // namespace

void save_sinogram(const Sinogram& sino, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_sinogram: cannot open " + path.string());
    os.write(kMagic, 4);
    write_pod(os, kVersion);
    write_pod(os, static_cast<uint32_t>(sino.n_angles()));
    write_pod(os, static_cast<uint32_t>(sino.n_bins));
    write_pod(os, sino.bin_spacing);
    for (double a : sino.angles) write_pod(os, a);
    for (double v : sino.values) write_pod(os, static_cast<float>(v));
    if (!os) throw std::runtime_error("save_sinogram: write failure on " + path.string());
}

Sinogram load_sinogram(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_sinogram: cannot open " + path.string());
    size_t offset = 0;

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_sinogram: bad magic at byte offset 0 in " + path.string());
    offset = 4;

    const uint16_t version = read_pod<uint16_t>(is, offset, "version");
    if (version != kVersion)
        throw std::runtime_error("load_sinogram: unsupported version " + std::to_string(version) +
                                 " at byte offset 4");
    const uint32_t n_angles = read_pod<uint32_t>(is, offset, "n_angles");
    const uint32_t n_bins = read_pod<uint32_t>(is, offset, "n_bins");
    if (n_angles == 0 || n_bins == 0)
        throw std::runtime_error("load_sinogram: zero n_angles or n_bins in header");
    const double spacing = read_pod<double>(is, offset, "bin_spacing");

    std::vector<double> angles(n_angles);
    for (uint32_t i = 0; i < n_angles; ++i) angles[i] = read_pod<double>(is, offset, "angles");

    Sinogram sino(std::move(angles), static_cast<int>(n_bins), spacing);
    const size_t expect = static_cast<size_t>(n_angles) * n_bins;
    for (size_t i = 0; i < expect; ++i) {
        float v;
        is.read(reinterpret_cast<char*>(&v), sizeof(float));
        if (!is)
            throw std::runtime_error("load_sinogram: truncated payload, expected " +
                                     std::to_string(expect * sizeof(float)) + " value bytes, got " +
                                     std::to_string(i * sizeof(float)) + " (byte offset " +
                                     std::to_string(offset) + ")");
        offset += sizeof(float);
        sino.values[i] = v;
    }
    return sino;
}

void save_image(const ImageGrid& img, const std::filesystem::path& path, ImageFormat format) {
    double lo, hi;
    const std::vector<uint16_t> pix = normalize_u16(img, lo, hi);
    const int w = img.width, h = img.height;

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_image: cannot open " + path.string());

    if (format == ImageFormat::pgm16) {
        os << "P5\n" << w << " " << h << "\n65535\n";
        for (uint16_t v : pix) {  // PGM samples are big-endian
            const uint8_t b[2] = {static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v & 0xff)};
            os.write(reinterpret_cast<const char*>(b), 2);
        }
    } else {
        // Raw scanlines: filter byte 0 + big-endian 16-bit samples.
        std::vector<uint8_t> raw;
        raw.reserve(static_cast<size_t>(h) * (1 + 2 * w));
        for (int j = 0; j < h; ++j) {
            raw.push_back(0);
            for (int i = 0; i < w; ++i) {
                const uint16_t v = pix[static_cast<size_t>(j) * w + i];
                raw.push_back(static_cast<uint8_t>(v >> 8));
                raw.push_back(static_cast<uint8_t>(v & 0xff));
            }
        }
        uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
        std::vector<uint8_t> comp(comp_len);
        if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
            throw std::runtime_error("save_image: deflate failure");
        comp.resize(comp_len);

        static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
        os.write(reinterpret_cast<const char*>(sig), 8);
        std::vector<uint8_t> ihdr;
        write_be32(ihdr, static_cast<uint32_t>(w));
        write_be32(ihdr, static_cast<uint32_t>(h));
        ihdr.push_back(16);  // bit depth
        ihdr.push_back(0);   // grayscale
        ihdr.push_back(0);
        ihdr.push_back(0);
        ihdr.push_back(0);
        png_chunk(os, "IHDR", ihdr);
        png_chunk(os, "IDAT", comp);
        png_chunk(os, "IEND", {});
    }
    if (!os) throw std::runtime_error("save_image: write failure on " + path.string());
    write_scale_sidecar(path, lo, hi);
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_csv: cannot open " + path.string());
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    if (!os) throw std::runtime_error("save_csv: write failure on " + path.string());
}

uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("hash_file: cannot open " + path.string());
    uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<uint8_t>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!is) break;
    }
    return h;
}

}  // namespace dualgrid
