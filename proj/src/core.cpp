#include "fakeflow/core.hpp"

#include <array>
#include <iostream>
#include <mutex>

namespace fakeflow {

namespace {
std::ostream* g_warning_stream = &std::clog;
std::mutex g_warning_mutex;
}  // namespace

void set_warning_stream(std::ostream* os) {
    std::lock_guard lock(g_warning_mutex);
    g_warning_stream = os;
}

void warn(const std::string& message) {
    std::lock_guard lock(g_warning_mutex);
    if (g_warning_stream) *g_warning_stream << "warning: " << message << '\n';
}

const char* to_string(MotionStage stage) {
    switch (stage) {
        case MotionStage::Reversed: return "reversed";
        case MotionStage::Shifted: return "shifted";
        case MotionStage::Scaled: return "scaled";
        case MotionStage::UnitNormalized: return "unit_normalized";
    }
    return "unknown";
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t hash) {
    for (const std::uint8_t b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t hash) {
    return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                   hash);
}

std::uint64_t derive_sample_seed(const SampleSeed& seed) {
    if (seed.sample_id.empty()) throw InvalidArgument("sample_id must not be empty");
    std::array<std::uint8_t, 8> le{};
    for (std::size_t i = 0; i < le.size(); ++i)
        le[i] = static_cast<std::uint8_t>(seed.global_seed >> (8 * i));
    return fnv1a64(seed.sample_id, fnv1a64(le));
}

AugmentationParams sample_augmentation(std::uint64_t seed, ReverseMode mode) {
    SplitMix64 rng(seed);
    auto draw_axis = [&rng] {
        AxisParams a;
        a.delta = (rng.next() & 1U) != 0;
        a.epsilon = 2.0 * rng.next_unit() - 1.0;
        a.eta = rng.next_unit();
        return a;
    };
    AugmentationParams p;
    p.x = draw_axis();
    p.y = draw_axis();
    if (mode == ReverseMode::Shared) p.y.delta = p.x.delta;
    return p;
}

DepthMap normalize_depth(const RawDepthMap& raw) {
    const auto& values = raw.values;
    if (values.size() == 0) throw InvalidInput("depth map is empty");

    const double* data = values.data();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw InvalidInput("non-finite depth at pixel index " + std::to_string(i) + " (x=" +
                               std::to_string(i % values.cols()) +
                               ", y=" + std::to_string(i / values.cols()) + ")");
        }
    }

    DepthMap out;
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    if (hi == lo) {
        warn("constant depth map (" + std::to_string(lo) + "), normalizing to all zeros");
        out.values = Plane<float>::Zero(values.rows(), values.cols());
        out.degenerate = true;
        return out;
    }
    if (!std::isfinite(hi - lo)) {
        // range overflows double; halving keeps the ratio
        out.values = ((0.5 * values - 0.5 * lo) / (0.5 * hi - 0.5 * lo)).cast<float>();
        return out;
    }
    out.values = ((values - lo) / (hi - lo)).cast<float>();
    return out;
}

}  // namespace fakeflow
