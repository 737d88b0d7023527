#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "fakeflow/errors.hpp"
#include "fakeflow/types.hpp"

namespace fakeflow {

// ---------------------------------------------------------------------------
// Randomness contract
// ---------------------------------------------------------------------------

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t hash = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL);

/// FNV-1a-64 over the global seed as 8 little-endian bytes followed by the
/// UTF-8 sample id. Throws InvalidArgument on an empty id.
std::uint64_t derive_sample_seed(const SampleSeed& seed);

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Top 53 bits scaled into [0,1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

enum class ReverseMode { PerAxis, Shared };

/// Draws x.delta, x.epsilon, x.eta, y.delta, y.epsilon, y.eta in that order.
/// With ReverseMode::Shared all six values are still drawn and y.delta is
/// then overwritten by x.delta.
AugmentationParams sample_augmentation(std::uint64_t seed,
                                       ReverseMode mode = ReverseMode::PerAxis);

// ---------------------------------------------------------------------------
// Depth normalization
// ---------------------------------------------------------------------------

/// (raw - min) / (max - min), computed in double and stored as float.
/// Constant input yields all zeros with `degenerate` set and a warning.
/// Throws InvalidInput naming the first non-finite pixel.
DepthMap normalize_depth(const RawDepthMap& raw);

// ---------------------------------------------------------------------------
// Depth-to-motion conversion
// ---------------------------------------------------------------------------

/// 2*delta*(1-D) + 2*(1-delta)*D - 1, evaluated as +/-(2D - 1) so that the
/// two reverse settings are exact negatives of each other.
template <typename Derived>
Plane<typename Derived::Scalar> reverse_map(const Eigen::ArrayBase<Derived>& depth, bool delta) {
    using Scalar = typename Derived::Scalar;
    const Scalar sign = delta ? Scalar(-1) : Scalar(1);
    return sign * (Scalar(2) * depth - Scalar(1));
}

inline Plane<float> reverse_map(const DepthMap& depth, bool delta) {
    return reverse_map(depth.values, delta);
}

template <typename Derived>
Plane<typename Derived::Scalar> shift_map(const Eigen::ArrayBase<Derived>& motion, double epsilon) {
    using Scalar = typename Derived::Scalar;
    if (!(epsilon >= -1.0 && epsilon <= 1.0))
        throw InvalidArgument("shift epsilon " + std::to_string(epsilon) + " outside [-1, 1]");
    return motion + static_cast<Scalar>(epsilon);
}

template <typename Derived>
Plane<typename Derived::Scalar> scale_map(const Eigen::ArrayBase<Derived>& motion, double eta) {
    using Scalar = typename Derived::Scalar;
    if (!(eta >= 0.0 && eta <= 1.0))
        throw InvalidArgument("scale eta " + std::to_string(eta) + " outside [0, 1]");
    return static_cast<Scalar>(eta) * motion;
}

template <typename Derived>
Plane<typename Derived::Scalar> axis_motion(const Eigen::ArrayBase<Derived>& depth,
                                            const AxisParams& axis) {
    return scale_map(shift_map(reverse_map(depth, axis.delta), axis.epsilon), axis.eta);
}

/// Every intermediate of the depth-to-motion conversion.
template <typename Scalar>
struct MotionStages {
    MotionField<Scalar> reversed;
    MotionField<Scalar> shifted;
    MotionField<Scalar> scaled;
};

/// A degenerate (constant) depth map carries no motion: all stages are zero.
template <typename Scalar = float>
MotionStages<Scalar> motion_stages(const DepthMap& depth, const AugmentationParams& params) {
    if (!params.valid()) {
        // surface the offending value through the stage functions
        const Plane<Scalar> probe = Plane<Scalar>::Zero(1, 1);
        axis_motion(probe, params.x);
        axis_motion(probe, params.y);
    }
    const Eigen::Index w = depth.width(), h = depth.height();
    if (depth.degenerate) {
        return {MotionField<Scalar>(w, h, MotionStage::Reversed), MotionField<Scalar>(w, h, MotionStage::Shifted),
                MotionField<Scalar>(w, h, MotionStage::Scaled)};
    }
    const Plane<Scalar> d = depth.values.template cast<Scalar>();
    MotionStages<Scalar> s;
    s.reversed = {reverse_map(d, params.x.delta), reverse_map(d, params.y.delta), MotionStage::Reversed};
    s.shifted = {shift_map(s.reversed.u, params.x.epsilon), shift_map(s.reversed.v, params.y.epsilon),
                 MotionStage::Shifted};
    s.scaled = {scale_map(s.shifted.u, params.x.eta), scale_map(s.shifted.v, params.y.eta), MotionStage::Scaled};
    return s;
}

/// Per-axis reverse, shift and scale of the normalized depth.
template <typename Scalar = float>
MotionField<Scalar> depth_to_motion(const DepthMap& depth, const AugmentationParams& params) {
    return std::move(motion_stages<Scalar>(depth, params).scaled);
}

}  // namespace fakeflow
