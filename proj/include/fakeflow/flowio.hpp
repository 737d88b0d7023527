#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fakeflow/flowviz.hpp"
#include "fakeflow/types.hpp"

namespace fakeflow {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Depth inputs
// ---------------------------------------------------------------------------

/// Single-channel 16-bit PNG; pixel k becomes k / 65535.
RawDepthMap decode_depth_png16(std::span<const std::uint8_t> png);
RawDepthMap read_depth_png16(const std::filesystem::path& path);

/// Grayscale PFM ("Pf"). A negative scale means little-endian samples.
/// Rows are stored bottom-up and returned top-down.
RawDepthMap decode_depth_pfm(std::span<const std::uint8_t> pfm);
RawDepthMap read_depth_pfm(const std::filesystem::path& path);

/// Dispatches on extension (.png / .pfm, case-insensitive).
RawDepthMap read_depth(const std::filesystem::path& path);

bool is_depth_extension(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Middlebury .flo
// ---------------------------------------------------------------------------

inline constexpr float kFloMagic = 202021.25f;

/// 4-byte magic, int32 width, int32 height, then (u,v) float pairs row by
/// row; everything little-endian.
Bytes encode_flo(const MotionField<float>& m);
MotionField<float> decode_flo(std::span<const std::uint8_t> bytes);

void write_flo(const MotionField<float>& m, const std::filesystem::path& path);
MotionField<float> read_flo(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// PNG outputs
// ---------------------------------------------------------------------------

struct PngInfo {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    int channels = 0;
};

PngInfo probe_png(std::span<const std::uint8_t> png);

Bytes encode_png_rgb(const FlowImage& img);
FlowImage decode_png_rgb(std::span<const std::uint8_t> png);
void write_png_rgb(const FlowImage& img, const std::filesystem::path& path);
FlowImage read_png_rgb(const std::filesystem::path& path);

Bytes encode_png_gray8(int width, int height, std::span<const std::uint8_t> pixels);
Bytes encode_png_gray16(int width, int height, std::span<const std::uint16_t> pixels);
void write_png_gray16(int width, int height, std::span<const std::uint16_t> pixels,
                      const std::filesystem::path& path);

}  // namespace fakeflow
