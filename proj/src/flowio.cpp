#include "fakeflow/flowio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "fakeflow/errors.hpp"

namespace fakeflow {

namespace fs = std::filesystem;

Bytes read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return bytes;
}

void write_file_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "': " + std::strerror(errno));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// ---------------------------------------------------------------------------
// libpng glue. libpng reports errors by longjmp; everything touched after
// setjmp lives behind pointers that are fixed before it.
// ---------------------------------------------------------------------------

struct PngDecoded {
    PngInfo info;
    int color_type = 0;
    std::vector<std::uint8_t> pixels;  // rows packed, native PNG byte order
    std::vector<png_bytep> rows;
};

struct PngIo {
    std::span<const std::uint8_t> input;
    std::size_t pos = 0;
    Bytes* output = nullptr;
    char message[256] = {};
};

void png_error_cb(png_structp png, png_const_charp msg) {
    auto* io = static_cast<PngIo*>(png_get_error_ptr(png));
    std::snprintf(io->message, sizeof io->message, "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

void png_read_cb(png_structp png, png_bytep dst, png_size_t n) {
    auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
    if (io->input.size() - io->pos < n) png_error(png, "truncated PNG data");
    std::memcpy(dst, io->input.data() + io->pos, n);
    io->pos += n;
}

void png_write_cb(png_structp png, png_bytep src, png_size_t n) {
    auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
    io->output->insert(io->output->end(), src, src + n);
}

void png_flush_cb(png_structp) {}

// Returns false with io->message set on failure.
bool png_decode_raw(PngIo* io, PngDecoded* out, bool header_only) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, io, png_error_cb, png_warning_cb);
    if (!png) {
        std::snprintf(io->message, sizeof io->message, "out of memory");
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        std::snprintf(io->message, sizeof io->message, "out of memory");
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, io, png_read_cb);
    png_read_info(png, info);
    out->info.width = static_cast<int>(png_get_image_width(png, info));
    out->info.height = static_cast<int>(png_get_image_height(png, info));
    out->info.bit_depth = png_get_bit_depth(png, info);
    out->info.channels = png_get_channels(png, info);
    out->color_type = png_get_color_type(png, info);
    if (!header_only) {
        png_set_interlace_handling(png);
        png_read_update_info(png, info);
        const std::size_t stride = png_get_rowbytes(png, info);
        const auto h = static_cast<std::size_t>(out->info.height);
        out->pixels.resize(stride * h);
        out->rows.resize(h);
        for (std::size_t y = 0; y < h; ++y) out->rows[y] = out->pixels.data() + y * stride;
        png_read_image(png, out->rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

PngDecoded png_decode(std::span<const std::uint8_t> bytes, bool header_only = false) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw FormatError("not a PNG file (bad signature)");
    PngIo io;
    io.input = bytes;
    PngDecoded out;
    if (!png_decode_raw(&io, &out, header_only)) {
        const std::string msg = io.message;
        if (msg.find("truncated") != std::string::npos || msg.find("Read Error") != std::string::npos)
            throw TruncationError("corrupt PNG: " + msg);
        throw FormatError("corrupt PNG: " + msg);
    }
    return out;
}

bool png_encode_raw(PngIo* io, int width, int height, int bit_depth, int color_type,
                    png_bytepp rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, io, png_error_cb, png_warning_cb);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, io, png_write_cb, png_flush_cb);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

Bytes png_encode(int width, int height, int bit_depth, int color_type, int channels,
                 std::span<const std::uint8_t> packed) {
    if (width < 1 || height < 1) throw InvalidArgument("PNG dimensions must be positive");
    const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    if (packed.size() != stride * static_cast<std::size_t>(height))
        throw InvalidArgument("pixel buffer size does not match PNG dimensions");
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (std::size_t y = 0; y < rows.size(); ++y)
        rows[y] = const_cast<png_bytep>(packed.data() + y * stride);
    Bytes out;
    PngIo io;
    io.output = &out;
    if (!png_encode_raw(&io, width, height, bit_depth, color_type, rows.data()))
        throw IoError(std::string("PNG encoding failed: ") + io.message);
    return out;
}

std::string describe_png(const PngDecoded& d) {
    const char* kind = "unknown";
    switch (d.color_type) {
        case PNG_COLOR_TYPE_GRAY: kind = "grayscale"; break;
        case PNG_COLOR_TYPE_GRAY_ALPHA: kind = "grayscale+alpha"; break;
        case PNG_COLOR_TYPE_RGB: kind = "RGB"; break;
        case PNG_COLOR_TYPE_RGB_ALPHA: kind = "RGBA"; break;
        case PNG_COLOR_TYPE_PALETTE: kind = "palette"; break;
    }
    return std::to_string(d.info.bit_depth) + "-bit " + kind + " (" +
           std::to_string(d.info.channels) + " channel" + (d.info.channels == 1 ? "" : "s") + ")";
}

// ---------------------------------------------------------------------------
// little-endian helpers
// ---------------------------------------------------------------------------

std::uint32_t load_u32(const std::uint8_t* p, bool little) {
    if (little)
        return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
               std::uint32_t(p[3]) << 24;
    return std::uint32_t(p[3]) | std::uint32_t(p[2]) << 8 | std::uint32_t(p[1]) << 16 |
           std::uint32_t(p[0]) << 24;
}

void store_u32_le(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

}  // namespace

// ---------------------------------------------------------------------------
// Depth readers
// ---------------------------------------------------------------------------

RawDepthMap decode_depth_png16(std::span<const std::uint8_t> png) {
    const PngDecoded d = png_decode(png);
    if (d.info.bit_depth != 16 || d.color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError("depth PNG: expected 16-bit single-channel grayscale, found " +
                          describe_png(d));
    RawDepthMap raw;
    raw.values.resize(d.info.height, d.info.width);
    const std::uint8_t* p = d.pixels.data();
    for (Eigen::Index i = 0; i < raw.values.size(); ++i, p += 2)
        raw.values.data()[i] = static_cast<double>(std::uint16_t(p[0] << 8 | p[1])) / 65535.0;
    return raw;
}

RawDepthMap read_depth_png16(const fs::path& path) {
    try {
        return decode_depth_png16(read_file_bytes(path));
    } catch (const FormatError& e) {
        if (dynamic_cast<const TruncationError*>(&e))
            throw TruncationError(path.string() + ": " + e.what());
        throw FormatError(path.string() + ": " + e.what());
    }
}

RawDepthMap decode_depth_pfm(std::span<const std::uint8_t> pfm) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < pfm.size() && std::isspace(pfm[pos])) ++pos;
    };
    auto token = [&]() -> std::string {
        skip_space();
        const std::size_t start = pos;
        while (pos < pfm.size() && !std::isspace(pfm[pos])) ++pos;
        if (start == pos) throw TruncationError("PFM: truncated header");
        return {reinterpret_cast<const char*>(pfm.data() + start), pos - start};
    };

    const std::string magic = token();
    if (magic == "PF") throw FormatError("PFM: color 'PF' files are not supported, expected 'Pf'");
    if (magic != "Pf") throw FormatError("PFM: bad magic '" + magic.substr(0, 8) + "', expected 'Pf'");

    auto parse_int = [](const std::string& s, const char* what) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1)
            throw FormatError(std::string("PFM: invalid ") + what + " '" + s + "'");
        return v;
    };
    const int width = parse_int(token(), "width");
    const int height = parse_int(token(), "height");
    const std::string scale_text = token();
    double scale = 0.0;
    try {
        std::size_t used = 0;
        scale = std::stod(scale_text, &used);
        if (used != scale_text.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw FormatError("PFM: invalid scale '" + scale_text + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("PFM: scale must be finite and nonzero");
    // exactly one whitespace byte separates the header from the raster
    if (pos >= pfm.size() || !std::isspace(pfm[pos])) throw TruncationError("PFM: truncated header");
    ++pos;

    const bool little = scale < 0.0;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if ((pfm.size() - pos) / 4 < count)
        throw TruncationError("PFM: payload has " + std::to_string(pfm.size() - pos) +
                              " bytes, expected " + std::to_string(count * 4));

    RawDepthMap raw;
    raw.values.resize(height, width);
    for (int row = 0; row < height; ++row) {
        const int dst_row = height - 1 - row;  // stored bottom-up
        for (int x = 0; x < width; ++x) {
            const float f = std::bit_cast<float>(load_u32(pfm.data() + pos, little));
            pos += 4;
            if (!std::isfinite(f))
                throw FormatError("PFM: non-finite value at x=" + std::to_string(x) +
                                  ", y=" + std::to_string(dst_row));
            raw.values(dst_row, x) = f;
        }
    }
    return raw;
}

RawDepthMap read_depth_pfm(const fs::path& path) {
    try {
        return decode_depth_pfm(read_file_bytes(path));
    } catch (const TruncationError& e) {
        throw TruncationError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

bool is_depth_extension(const fs::path& path) {
    const std::string ext = lower_extension(path);
    return ext == ".png" || ext == ".pfm";
}

RawDepthMap read_depth(const fs::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") return read_depth_png16(path);
    if (ext == ".pfm") return read_depth_pfm(path);
    throw FormatError(path.string() + ": unsupported depth format '" + ext + "' (expected .png or .pfm)");
}

// ---------------------------------------------------------------------------
// .flo
// ---------------------------------------------------------------------------

Bytes encode_flo(const MotionField<float>& m) {
    const auto w = m.width(), h = m.height();
    if (w < 1 || h < 1) throw InvalidArgument(".flo: field must be at least 1x1");
    if (!m.u.allFinite() || !m.v.allFinite()) throw InvalidInput(".flo: field contains non-finite values");
    Bytes out(12 + 8 * static_cast<std::size_t>(w * h));
    store_u32_le(out.data(), std::bit_cast<std::uint32_t>(kFloMagic));
    store_u32_le(out.data() + 4, static_cast<std::uint32_t>(static_cast<std::int32_t>(w)));
    store_u32_le(out.data() + 8, static_cast<std::uint32_t>(static_cast<std::int32_t>(h)));
    std::uint8_t* p = out.data() + 12;
    for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < w; ++x, p += 8) {
            store_u32_le(p, std::bit_cast<std::uint32_t>(m.u(y, x)));
            store_u32_le(p + 4, std::bit_cast<std::uint32_t>(m.v(y, x)));
        }
    }
    return out;
}

MotionField<float> decode_flo(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw TruncationError(".flo: file shorter than its 4-byte magic");
    if (std::bit_cast<float>(load_u32(bytes.data(), true)) != kFloMagic)
        throw FormatError("not a .flo file (bad magic)");
    if (bytes.size() < 12) throw TruncationError(".flo: truncated header");
    const auto w = static_cast<std::int32_t>(load_u32(bytes.data() + 4, true));
    const auto h = static_cast<std::int32_t>(load_u32(bytes.data() + 8, true));
    if (w < 1 || h < 1)
        throw FormatError(".flo: invalid dimensions " + std::to_string(w) + "x" + std::to_string(h));
    const std::uint64_t expected = 12 + 8 * std::uint64_t(w) * std::uint64_t(h);
    if (bytes.size() < expected)
        throw TruncationError(".flo: file has " + std::to_string(bytes.size()) + " bytes, expected " +
                              std::to_string(expected));
    if (bytes.size() > expected)
        throw FormatError(".flo: file has " + std::to_string(bytes.size() - expected) +
                          " unexpected trailing bytes");
    MotionField<float> m(w, h, MotionStage::Scaled);
    const std::uint8_t* p = bytes.data() + 12;
    for (std::int32_t y = 0; y < h; ++y) {
        for (std::int32_t x = 0; x < w; ++x, p += 8) {
            m.u(y, x) = std::bit_cast<float>(load_u32(p, true));
            m.v(y, x) = std::bit_cast<float>(load_u32(p + 4, true));
        }
    }
    return m;
}

void write_flo(const MotionField<float>& m, const fs::path& path) {
    write_file_bytes(path, encode_flo(m));
}

MotionField<float> read_flo(const fs::path& path) { return decode_flo(read_file_bytes(path)); }

// ---------------------------------------------------------------------------
// PNG outputs
// ---------------------------------------------------------------------------

PngInfo probe_png(std::span<const std::uint8_t> png) { return png_decode(png, true).info; }

Bytes encode_png_rgb(const FlowImage& img) {
    return png_encode(img.width, img.height, 8, PNG_COLOR_TYPE_RGB, 3, img.rgb);
}

FlowImage decode_png_rgb(std::span<const std::uint8_t> png) {
    PngDecoded d = png_decode(png);
    if (d.info.bit_depth != 8 || d.color_type != PNG_COLOR_TYPE_RGB)
        throw FormatError("flow PNG: expected 8-bit RGB, found " + describe_png(d));
    FlowImage img;
    img.width = d.info.width;
    img.height = d.info.height;
    img.rgb = std::move(d.pixels);
    return img;
}

void write_png_rgb(const FlowImage& img, const fs::path& path) {
    write_file_bytes(path, encode_png_rgb(img));
}

FlowImage read_png_rgb(const fs::path& path) { return decode_png_rgb(read_file_bytes(path)); }

Bytes encode_png_gray8(int width, int height, std::span<const std::uint8_t> pixels) {
    return png_encode(width, height, 8, PNG_COLOR_TYPE_GRAY, 1, pixels);
}

Bytes encode_png_gray16(int width, int height, std::span<const std::uint16_t> pixels) {
    std::vector<std::uint8_t> be(pixels.size() * 2);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        be[2 * i] = static_cast<std::uint8_t>(pixels[i] >> 8);
        be[2 * i + 1] = static_cast<std::uint8_t>(pixels[i]);
    }
    return png_encode(width, height, 16, PNG_COLOR_TYPE_GRAY, 1, be);
}

void write_png_gray16(int width, int height, std::span<const std::uint16_t> pixels,
                      const fs::path& path) {
    write_file_bytes(path, encode_png_gray16(width, height, pixels));
}

}  // namespace fakeflow
