#include "fakeflow/flowviz.hpp"

namespace fakeflow {

ColorWheel::ColorWheel() {
    // Each segment ramps one channel while the other two are held at 0 / 255.
    struct Ramp {
        int rising;   // channel ramping up (-1: none)
        int falling;  // channel ramping down (-1: none)
        int full;     // channel held at 255
    };
    constexpr std::array<Ramp, 6> ramps{{
        {1, -1, 0},  // red -> yellow
        {-1, 0, 1},  // yellow -> green
        {2, -1, 1},  // green -> cyan
        {-1, 1, 2},  // cyan -> blue
        {0, -1, 2},  // blue -> magenta
        {-1, 2, 0},  // magenta -> red
    }};
    std::size_t k = 0;
    for (std::size_t s = 0; s < ramps.size(); ++s) {
        const int len = kSegments[s];
        for (int i = 0; i < len; ++i, ++k) {
            std::array<std::uint8_t, 3> c{};
            const auto step = static_cast<std::uint8_t>(255 * i / len);
            c[static_cast<std::size_t>(ramps[s].full)] = 255;
            if (ramps[s].rising >= 0) c[static_cast<std::size_t>(ramps[s].rising)] = step;
            if (ramps[s].falling >= 0)
                c[static_cast<std::size_t>(ramps[s].falling)] = static_cast<std::uint8_t>(255 - step);
            colors_[k] = {c[0], c[1], c[2]};
        }
    }
}

ColorWheel build_color_wheel() { return ColorWheel{}; }

const ColorWheel& default_color_wheel() {
    static const ColorWheel wheel;
    return wheel;
}

std::vector<std::uint8_t> depth_to_gray8(const DepthMap& depth) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(depth.values.size()));
    const float* d = depth.values.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(d[i], 0.0f, 1.0f) * 255.0f));
    return out;
}

}  // namespace fakeflow
