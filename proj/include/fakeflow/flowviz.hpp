#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fakeflow/errors.hpp"
#include "fakeflow/types.hpp"

namespace fakeflow {

struct Rgb8 {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb8&) const = default;
};

/// Middlebury flow color wheel: red, yellow, green, cyan, blue, magenta and
/// back, with 15/6/4/11/13/6 entries per segment.
class ColorWheel {
public:
    static constexpr std::array<int, 6> kSegments{15, 6, 4, 11, 13, 6};
    static constexpr int kSize = 55;

    ColorWheel();

    int size() const { return kSize; }
    const Rgb8& operator[](int i) const { return colors_[static_cast<std::size_t>(i)]; }
    const std::array<Rgb8, kSize>& colors() const { return colors_; }

    /// Channel `ch` at fractional index fk in [0, kSize-1], as a value in [0,1].
    /// Interpolates linearly and wraps from the last entry back to the first.
    double interpolate(double fk, int ch) const {
        const int k0 = static_cast<int>(fk);
        const int k1 = (k0 + 1) % kSize;
        const double f = fk - k0;
        const double c0 = channel(k0, ch) / 255.0;
        const double c1 = channel(k1, ch) / 255.0;
        return (1.0 - f) * c0 + f * c1;
    }

private:
    std::uint8_t channel(int k, int ch) const {
        const Rgb8& c = colors_[static_cast<std::size_t>(k)];
        return ch == 0 ? c.r : (ch == 1 ? c.g : c.b);
    }

    std::array<Rgb8, kSize> colors_{};
};

ColorWheel build_color_wheel();

/// Process-wide immutable wheel.
const ColorWheel& default_color_wheel();

/// 8-bit interleaved RGB image.
struct FlowImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // height * width * 3

    FlowImage() = default;
    FlowImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    Rgb8 at(int x, int y) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
    void set(int x, int y, Rgb8 c) {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        rgb[i] = c.r;
        rgb[i + 1] = c.g;
        rgb[i + 2] = c.b;
    }
    bool operator==(const FlowImage&) const = default;
};

/// Below this max norm a field is treated as zero motion.
inline constexpr double kDegenerateNorm = 1e-8;

template <typename Scalar>
struct NormalizedMotion {
    MotionField<Scalar> field;  // stage UnitNormalized
    double max_norm = 0.0;      // norm of the input's largest vector
    bool degenerate = false;
};

/// Divides every vector by the largest vector norm in the field. A field
/// whose max norm is below kDegenerateNorm becomes all zeros and is flagged.
/// After rounding to Scalar no pixel norm exceeds 1.
template <typename Scalar>
NormalizedMotion<Scalar> unit_normalize(const MotionField<Scalar>& m) {
    NormalizedMotion<Scalar> out;
    const Eigen::Index h = m.height(), w = m.width();
    out.max_norm = m.max_norm();
    if (!(out.max_norm >= kDegenerateNorm)) {
        out.field = MotionField<Scalar>(w, h, MotionStage::UnitNormalized);
        out.degenerate = true;
        return out;
    }
    const double scale = out.max_norm;
    Plane<Scalar> u(h, w), v(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < w; ++x) {
            Scalar nu = static_cast<Scalar>(static_cast<double>(m.u(y, x)) / scale);
            Scalar nv = static_cast<Scalar>(static_cast<double>(m.v(y, x)) / scale);
            auto norm = [&] {
                const double du = nu, dv = nv;
                return std::sqrt(du * du + dv * dv);
            };
            while (norm() > 1.0) {
                Scalar& big = std::abs(nu) >= std::abs(nv) ? nu : nv;
                big = std::nextafter(big, Scalar(0));
            }
            u(y, x) = nu;
            v(y, x) = nv;
        }
    }
    out.field = MotionField<Scalar>(std::move(u), std::move(v), MotionStage::UnitNormalized);
    return out;
}

/// Color-wheel rendering: hue from atan2(-v, -u), saturation from the radius.
/// Radii above 1 are darkened by 0.75 instead. Quantized with floor(255 c).
/// Throws InvalidInput on NaN.
template <typename Scalar>
FlowImage flow_to_color(const MotionField<Scalar>& m, const ColorWheel& wheel) {
    const int h = static_cast<int>(m.height());
    const int w = static_cast<int>(m.width());
    const int n = wheel.size();
    FlowImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = static_cast<double>(m.u(y, x));
            const double v = static_cast<double>(m.v(y, x));
            if (std::isnan(u) || std::isnan(v)) {
                throw InvalidInput("NaN motion at pixel (" + std::to_string(x) + ", " +
                                   std::to_string(y) + ")");
            }
            const double rad = std::sqrt(u * u + v * v);
            const double a = std::atan2(-v, -u) / std::numbers::pi;
            const double fk = (a + 1.0) / 2.0 * (n - 1);
            std::array<std::uint8_t, 3> px{};
            for (int ch = 0; ch < 3; ++ch) {
                double col = wheel.interpolate(fk, ch);
                if (rad <= 1.0)
                    col = 1.0 - rad * (1.0 - col);
                else
                    col *= 0.75;
                px[static_cast<std::size_t>(ch)] = static_cast<std::uint8_t>(255.0 * col);
            }
            img.set(x, y, {px[0], px[1], px[2]});
        }
    }
    return img;
}

/// Max-norm normalization followed by colorization; zero fields render white.
/// Normalization runs in double whatever the field's scalar type.
template <typename Scalar>
FlowImage render_flow(const MotionField<Scalar>& m, const ColorWheel& wheel) {
    return flow_to_color(unit_normalize(m.template cast<double>()).field, wheel);
}

template <typename Scalar>
FlowImage render_flow(const MotionField<Scalar>& m) {
    return render_flow(m, default_color_wheel());
}

/// 8-bit preview of a normalized depth map, round(255 D).
std::vector<std::uint8_t> depth_to_gray8(const DepthMap& depth);

/// Preview of one motion stage: R = u, G = v, both mapped linearly from
/// [-2, 2] to [0, 255] (clamped), B = 0.
template <typename Scalar>
FlowImage motion_to_rg(const MotionField<Scalar>& m) {
    const int h = static_cast<int>(m.height());
    const int w = static_cast<int>(m.width());
    FlowImage img(w, h);
    auto q = [](double c) {
        return static_cast<std::uint8_t>(std::lround(std::clamp((c + 2.0) / 4.0, 0.0, 1.0) * 255.0));
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.set(x, y, {q(m.u(y, x)), q(m.v(y, x)), 0});
    return img;
}

}  // namespace fakeflow
