#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fakeflow/core.hpp"
#include "fakeflow/errors.hpp"
#include "fakeflow/flowio.hpp"

namespace fakeflow::testing {

namespace fs = std::filesystem;

/// Redirects library warnings into a buffer for the scope's lifetime.
struct CaptureWarnings {
    std::ostringstream sink;
    CaptureWarnings() { set_warning_stream(&sink); }
    ~CaptureWarnings() { set_warning_stream(&std::clog); }
};

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "fakeflow") {
        std::random_device rd;
        const auto suffix = (std::uint64_t(rd()) << 32) ^ rd();
        path_ = fs::temp_directory_path() / (tag + "_" + std::to_string(suffix));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void touch(const fs::path& p, const std::string& content = "img") {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

/// Smooth synthetic depth: tilted plane plus a bump whose position depends
/// on `variant`.
inline std::vector<std::uint16_t> synthetic_depth(int width, int height, int variant) {
    std::vector<std::uint16_t> px(static_cast<std::size_t>(width) * height);
    const double cx = (0.2 + 0.6 * ((variant * 37) % 100) / 100.0) * width;
    const double cy = (0.2 + 0.6 * ((variant * 61) % 100) / 100.0) * height;
    const double r = 0.25 * std::min(width, height) + 1.0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double plane = 0.5 * y / std::max(1, height - 1) + 0.1 * x / std::max(1, width - 1);
            const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
            const double value = std::clamp(plane + 0.4 * std::exp(-d2), 0.0, 1.0);
            px[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint16_t>(std::lround(value * 65535.0));
        }
    }
    return px;
}

inline void write_depth_fixture(const fs::path& p, int width, int height, int variant) {
    fs::create_directories(p.parent_path());
    write_png_gray16(width, height, synthetic_depth(width, height, variant), p);
}

/// images/<stem>.jpg + depths/<stem>.png for stems img_00000 .. img_<n-1>.
inline void make_dataset(const fs::path& root, int n, int width = 32, int height = 24) {
    for (int i = 0; i < n; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "img_%05d", i);
        touch(root / "images" / (std::string(stem) + ".jpg"));
        write_depth_fixture(root / "depths" / (std::string(stem) + ".png"), width, height, i);
    }
}

/// FNV-1a over every file (sorted relative path, then bytes). manifest.json
/// enters with its "run" object (timestamp, jobs, output dir) removed.
inline std::uint64_t tree_checksum(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    std::uint64_t h = fnv1a64(std::string_view{});
    for (const auto& rel : files) {
        h = fnv1a64(rel.generic_string(), h);
        Bytes bytes = read_file_bytes(root / rel);
        if (rel == "manifest.json") {
            auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
            j.erase("run");
            const std::string text = j.dump();
            bytes.assign(text.begin(), text.end());
        }
        h = fnv1a64(bytes, h);
    }
    return h;
}

}  // namespace fakeflow::testing
