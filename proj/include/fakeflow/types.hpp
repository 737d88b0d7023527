#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace fakeflow {

/// Row-major per-pixel plane: rows() is the image height, cols() the width.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Depth in the estimator's native units, unbounded.
struct RawDepthMap {
    Plane<double> values;

    Eigen::Index width() const { return values.cols(); }
    Eigen::Index height() const { return values.rows(); }
};

/// Min-max normalized depth, every value in [0,1].
struct DepthMap {
    Plane<float> values;
    bool degenerate = false;  // source was constant

    Eigen::Index width() const { return values.cols(); }
    Eigen::Index height() const { return values.rows(); }
};

struct AxisParams {
    bool delta = false;    // value reverse
    double epsilon = 0.0;  // additive shift, [-1,1]
    double eta = 1.0;      // multiplicative scale, [0,1]

    bool valid() const {
        return epsilon >= -1.0 && epsilon <= 1.0 && eta >= 0.0 && eta <= 1.0;
    }
    bool operator==(const AxisParams&) const = default;
};

struct AugmentationParams {
    AxisParams x;
    AxisParams y;

    bool valid() const { return x.valid() && y.valid(); }
    bool operator==(const AugmentationParams&) const = default;
};

enum class MotionStage { Reversed, Shifted, Scaled, UnitNormalized };

const char* to_string(MotionStage stage);

template <typename Scalar>
struct MotionField {
    Plane<Scalar> u;
    Plane<Scalar> v;
    MotionStage stage = MotionStage::Scaled;

    MotionField() = default;
    MotionField(Plane<Scalar> u_, Plane<Scalar> v_, MotionStage s)
        : u(std::move(u_)), v(std::move(v_)), stage(s) {}
    MotionField(Eigen::Index width, Eigen::Index height, MotionStage s = MotionStage::Scaled)
        : u(Plane<Scalar>::Zero(height, width)), v(Plane<Scalar>::Zero(height, width)), stage(s) {}

    Eigen::Index width() const { return u.cols(); }
    Eigen::Index height() const { return u.rows(); }

    /// Per-pixel Euclidean norm, evaluated in double.
    Plane<double> norm() const {
        const auto ud = u.template cast<double>();
        const auto vd = v.template cast<double>();
        return (ud.square() + vd.square()).sqrt();
    }

    double max_norm() const { return u.size() == 0 ? 0.0 : norm().maxCoeff(); }

    template <typename Other>
    MotionField<Other> cast() const {
        return {u.template cast<Other>(), v.template cast<Other>(), stage};
    }
};

struct SampleSeed {
    std::uint64_t global_seed = 0;
    std::string sample_id;
};

}  // namespace fakeflow
