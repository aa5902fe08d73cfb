#include "tse/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <png.h>

namespace tse {

namespace {

bool has_extension(const std::filesystem::path& path, const char* ext) {
    std::string e = path.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& buf, std::size_t& pos) {
    while (pos < buf.size()) {
        const char c = buf[pos];
        if (c == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])) && buf[pos] != '#') ++pos;
    return buf.substr(start, pos - start);
}

int parse_header_int(const std::string& buf, std::size_t& pos, const std::string& what,
                     const std::filesystem::path& path) {
    const std::string tok = next_token(buf, pos);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw IoError("malformed PGM header (" + what + "): " + path.string());
    try {
        return std::stoi(tok);
    } catch (const std::out_of_range&) {
        throw IoError("malformed PGM header (" + what + "): " + path.string());
    }
}

ByteRaster read_pgm(const std::string& buf, const std::filesystem::path& path) {
    std::size_t pos = 2;
    const bool binary = buf[1] == '5';
    ByteRaster r;
    r.width = parse_header_int(buf, pos, "width", path);
    r.height = parse_header_int(buf, pos, "height", path);
    const int maxval = parse_header_int(buf, pos, "maxval", path);
    if (r.width == 0 || r.height == 0) throw IoError("zero-sized image: " + path.string());
    if (maxval != 255) throw IoError("unsupported format (PGM maxval must be 255): " + path.string());

    const std::size_t n = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
    r.bytes.resize(n);
    if (binary) {
        ++pos;  // single whitespace byte after maxval
        if (buf.size() < pos + n) throw IoError("truncated PGM data: " + path.string());
        std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(pos), n, r.bytes.begin());
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const int v = parse_header_int(buf, pos, "pixel", path);
            if (v > 255) throw IoError("PGM pixel exceeds maxval: " + path.string());
            r.bytes[i] = static_cast<std::uint8_t>(v);
        }
    }
    return r;
}

ByteRaster read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    if (image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) {
        png_image_free(&image);
        throw IoError("unsupported format (PNG must be 8-bit grayscale): " + path.string());
    }
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw IoError("zero-sized image: " + path.string());
    }
    image.format = PNG_FORMAT_GRAY;
    ByteRaster r;
    r.width = static_cast<int>(image.width);
    r.height = static_cast<int>(image.height);
    r.bytes.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, r.bytes.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    return r;
}

}  // namespace

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

std::uint8_t to_byte(double v) {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

ByteRaster read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("unreadable file: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '5' || buf[1] == '2')) return read_pgm(buf, path);
    static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (buf.size() >= 8 && std::equal(kPngSig, kPngSig + 8, reinterpret_cast<const unsigned char*>(buf.data())))
        return read_png(path);
    throw IoError("unsupported format: " + path.string());
}

void write_bytes(const ByteRaster& r, const std::filesystem::path& path) {
    if (has_extension(path, ".png")) {
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        image.width = static_cast<png_uint_32>(r.width);
        image.height = static_cast<png_uint_32>(r.height);
        image.format = PNG_FORMAT_GRAY;
        if (!png_image_write_to_file(&image, path.string().c_str(), 0, r.bytes.data(), 0, nullptr))
            throw IoError("cannot write " + path.string() + ": " + image.message);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("unwritable path: " + path.string());
    out << "P5\n" << r.width << ' ' << r.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

GrayImage load_image(const std::filesystem::path& path) {
    const ByteRaster r = read_bytes(path);
    GrayImage img(r.width, r.height);
    std::transform(r.bytes.begin(), r.bytes.end(), img.data.begin(),
                   [](std::uint8_t b) { return static_cast<double>(b) / 255.0; });
    return img;
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    ByteRaster r{img.width, img.height, std::vector<std::uint8_t>(img.size())};
    std::transform(img.data.begin(), img.data.end(), r.bytes.begin(), to_byte);
    write_bytes(r, path);
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const ByteRaster r = read_bytes(path);
    BinaryMask m(r.width, r.height);
    std::transform(r.bytes.begin(), r.bytes.end(), m.data.begin(),
                   [](std::uint8_t b) { return static_cast<std::uint8_t>(b >= 128 ? 1 : 0); });
    return m;
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    ByteRaster r{mask.width, mask.height, std::vector<std::uint8_t>(mask.size())};
    std::transform(mask.data.begin(), mask.data.end(), r.bytes.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
    write_bytes(r, path);
}

void save_pgm16(int width, int height, const std::vector<int>& values, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("unwritable path: " + path.string());
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    for (int v : values) {
        const auto u = static_cast<std::uint16_t>(std::clamp(v, 0, 65535));
        const char be[2] = {static_cast<char>(u >> 8), static_cast<char>(u & 0xFF)};
        out.write(be, 2);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace tse
