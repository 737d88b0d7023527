#include <doctest.h>

#include <cstring>
#include <iostream>
#include <sstream>

#include "fakeflow/core.hpp"
#include "support/generators.hpp"

using namespace fakeflow;
using namespace fakeflow::testing;

namespace {

RawDepthMap raw_from(std::initializer_list<double> values, int width, int height) {
    RawDepthMap raw;
    raw.values.resize(height, width);
    std::copy(values.begin(), values.end(), raw.values.data());
    return raw;
}

DepthMap depth_from(std::initializer_list<float> values, int width, int height) {
    DepthMap d;
    d.values.resize(height, width);
    std::copy(values.begin(), values.end(), d.values.data());
    return d;
}

struct SilenceWarnings {
    std::ostringstream sink;
    SilenceWarnings() { set_warning_stream(&sink); }
    ~SilenceWarnings() { set_warning_stream(&std::clog); }
};

}  // namespace

TEST_SUITE("normalize_depth") {
    TEST_CASE("two pixels map to the endpoints") {
        const DepthMap d = normalize_depth(raw_from({3.0, 7.0}, 2, 1));
        CHECK(d.values(0, 0) == 0.0f);
        CHECK(d.values(0, 1) == 1.0f);
        CHECK_FALSE(d.degenerate);
    }

    TEST_CASE("2x2 map") {
        const DepthMap d = normalize_depth(raw_from({1, 2, 3, 5}, 2, 2));
        CHECK(d.width() == 2);
        CHECK(d.height() == 2);
        CHECK(d.values(0, 0) == 0.0f);
        CHECK(d.values(0, 1) == 0.25f);
        CHECK(d.values(1, 0) == 0.5f);
        CHECK(d.values(1, 1) == 1.0f);
    }

    TEST_CASE("constant map is all zeros, flagged and warned about") {
        SilenceWarnings quiet;
        const DepthMap d = normalize_depth(raw_from({4, 4, 4}, 3, 1));
        CHECK(d.degenerate);
        CHECK((d.values == 0.0f).all());
        CHECK(quiet.sink.str().find("constant depth") != std::string::npos);
    }

    TEST_CASE("non-finite input names the first bad pixel") {
        const RawDepthMap raw = raw_from({1.0, 2.0, std::nan(""), INFINITY}, 2, 2);
        try {
            normalize_depth(raw);
            FAIL("expected InvalidInput");
        } catch (const InvalidInput& e) {
            CHECK(std::string(e.what()).find("pixel index 2") != std::string::npos);
        }
    }

    TEST_CASE("empty map is rejected") { CHECK_THROWS_AS(normalize_depth(RawDepthMap{}), InvalidInput); }

    TEST_CASE("property: exact 0 and 1 at the extremes, everything in [0,1]") {
        Rng rng(11);
        for (int trial = 0; trial < 300; ++trial) {
            const RawDepthMap raw = random_raw_depth(rng, uniform_int(rng, 1, 20), uniform_int(rng, 2, 20));
            const DepthMap d = normalize_depth(raw);
            Eigen::Index r0, c0, r1, c1;
            raw.values.minCoeff(&r0, &c0);
            raw.values.maxCoeff(&r1, &c1);
            REQUIRE(d.values(r0, c0) == 0.0f);
            REQUIRE(d.values(r1, c1) == 1.0f);
            REQUIRE((d.values >= 0.0f).all());
            REQUIRE((d.values <= 1.0f).all());
        }
    }

    TEST_CASE("near-constant depth keeps its contrast") {
        const DepthMap d = normalize_depth(raw_from({1e6, 1e6 + 1e-6, 1e6 + 2e-6}, 3, 1));
        CHECK(d.values(0, 0) == 0.0f);
        CHECK(d.values(0, 1) == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(d.values(0, 2) == 1.0f);
    }

    TEST_CASE("huge range does not overflow") {
        const DepthMap d = normalize_depth(raw_from({-1e308, 0.0, 1e308}, 3, 1));
        CHECK(d.values(0, 0) == 0.0f);
        CHECK(d.values(0, 1) == 0.5f);
        CHECK(d.values(0, 2) == 1.0f);
    }
}

TEST_SUITE("seeding") {
    TEST_CASE("FNV-1a-64 standard vectors") {
        CHECK(fnv1a64(std::string_view{}) == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64(std::string_view{"a"}) == 0xaf63dc4c8601ec8cULL);
    }

    TEST_CASE("derive_sample_seed") {
        CHECK(derive_sample_seed({0, "a"}) != derive_sample_seed({0, "b"}));
        CHECK(derive_sample_seed({0, "x"}) == derive_sample_seed({0, "x"}));
        // values frozen from an independent Python FNV-1a implementation
        CHECK(derive_sample_seed({0, "img_00001.jpg"}) == 0x258caafe879d2335ULL);
        CHECK(derive_sample_seed({7, "a"}) == 0x2bc5232166bea619ULL);
        CHECK(derive_sample_seed({1, "a"}) != derive_sample_seed({0, "a"}));
        CHECK_THROWS_AS(derive_sample_seed({0, ""}), InvalidArgument);
    }

    TEST_CASE("SplitMix64 reference stream") {
        SplitMix64 g(0);
        CHECK(g.next() == 0xe220a8397b1dcdafULL);
        CHECK(g.next() == 0x6e789e6aa1b965f4ULL);
        CHECK(g.next() == 0x06c45d188009454fULL);
    }
}

TEST_SUITE("sample_augmentation") {
    TEST_CASE("pinned draws for known seeds") {
        // frozen from an independent Python SplitMix64 with the same draw order
        const AugmentationParams p0 = sample_augmentation(0);
        CHECK(p0.x.delta == true);
        CHECK(p0.x.epsilon == -0.13694400590298006);
        CHECK(p0.x.eta == 0.026433771592597743);
        CHECK(p0.y.delta == false);
        CHECK(p0.y.epsilon == -0.7873066168655751);
        CHECK(p0.y.eta == 0.32732576421812576);

        const AugmentationParams p42 = sample_augmentation(42);
        CHECK(p42.x == AxisParams{true, -0.6801792142461598, 0.27860113025513866});
        CHECK(p42.y == AxisParams{false, -0.9239396629195076, 0.8682280765465323});
    }

    TEST_CASE("ranges and determinism") {
        for (std::uint64_t s = 0; s < 5000; ++s) {
            const std::uint64_t seed = s * 0x9e3779b97f4a7c15ULL;
            const AugmentationParams p = sample_augmentation(seed);
            REQUIRE(p.valid());
            REQUIRE(p.x.eta < 1.0);
            REQUIRE(p.y.eta < 1.0);
            REQUIRE(p == sample_augmentation(seed));
        }
    }

    TEST_CASE("shared reverse copies x.delta and leaves the other draws alone") {
        int differing = 0;
        for (std::uint64_t s = 0; s < 200; ++s) {
            const AugmentationParams per_axis = sample_augmentation(s);
            const AugmentationParams shared = sample_augmentation(s, ReverseMode::Shared);
            CHECK(shared.y.delta == shared.x.delta);
            CHECK(shared.x == per_axis.x);
            CHECK(shared.y.epsilon == per_axis.y.epsilon);
            CHECK(shared.y.eta == per_axis.y.eta);
            differing += per_axis.x.delta != per_axis.y.delta;
        }
        CHECK(differing > 50);
    }

    TEST_CASE("distribution over 1e5 seeds") {
        double eta = 0, eps = 0, delta = 0;
        const int n = 100000;
        for (int s = 0; s < n; ++s) {
            const AugmentationParams p = sample_augmentation(static_cast<std::uint64_t>(s));
            eta += p.x.eta + p.y.eta;
            eps += p.x.epsilon + p.y.epsilon;
            delta += p.x.delta + p.y.delta;
        }
        CHECK(eta / (2 * n) == doctest::Approx(0.5).epsilon(0.02));
        CHECK(std::abs(eps / (2 * n)) <= 0.01);
        CHECK(delta / (2 * n) == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_SUITE("depth to motion") {
    TEST_CASE("reverse_map examples") {
        const DepthMap d = depth_from({0.0f, 0.5f, 1.0f}, 3, 1);
        const Plane<float> fwd = reverse_map(d, false);
        CHECK(fwd(0, 0) == -1.0f);
        CHECK(fwd(0, 1) == 0.0f);
        CHECK(fwd(0, 2) == 1.0f);
        const Plane<float> rev = reverse_map(d, true);
        CHECK(rev(0, 0) == 1.0f);
        CHECK(rev(0, 2) == -1.0f);
    }

    TEST_CASE("property: reversal antisymmetry, range and monotonicity") {
        Rng rng(3);
        for (int trial = 0; trial < 200; ++trial) {
            const DepthMap d = random_depth(rng, uniform_int(rng, 1, 16), uniform_int(rng, 1, 16));
            const Plane<float> fwd = reverse_map(d, false);
            const Plane<float> rev = reverse_map(d, true);
            REQUIRE(((fwd + rev).abs() == 0.0f).all());
            REQUIRE((fwd.abs() <= 1.0f).all());
            const float* dv = d.values.data();
            for (Eigen::Index i = 1; i < d.values.size(); ++i) {
                if (dv[i - 1] < dv[i]) {
                    REQUIRE(fwd.data()[i - 1] < fwd.data()[i]);
                    REQUIRE(rev.data()[i - 1] > rev.data()[i]);
                }
            }
        }
    }

    TEST_CASE("shift_map") {
        Plane<float> m(1, 3);
        m << -1.0f, 0.0f, 1.0f;
        CHECK((shift_map(m, 0.0) == m).all());
        const Plane<float> up = shift_map(m, 1.0);
        CHECK(up(0, 0) == 0.0f);
        CHECK(up(0, 1) == 1.0f);
        CHECK(up(0, 2) == 2.0f);
        Plane<float> half(1, 1);
        half << 0.5f;
        CHECK(shift_map(half, -0.75)(0, 0) == -0.25f);
        CHECK_THROWS_AS(shift_map(m, 1.5), InvalidArgument);
        CHECK_THROWS_AS(shift_map(m, -1.01), InvalidArgument);
        CHECK_THROWS_AS(shift_map(m, std::nan("")), InvalidArgument);
    }

    TEST_CASE("scale_map") {
        Plane<float> m(1, 2);
        m << -2.0f, 2.0f;
        CHECK((scale_map(m, 1.0) == m).all());
        CHECK((scale_map(m, 0.0) == 0.0f).all());
        const Plane<float> half = scale_map(m, 0.5);
        CHECK(half(0, 0) == -1.0f);
        CHECK(half(0, 1) == 1.0f);
        CHECK_THROWS_AS(scale_map(m, -0.1), InvalidArgument);
        CHECK_THROWS_AS(scale_map(m, 1.1), InvalidArgument);
    }

    TEST_CASE("depth_to_motion examples") {
        const AxisParams identity{false, 0.0, 1.0};
        SUBCASE("constant mid depth gives zero motion") {
            const DepthMap d = depth_from({0.5f, 0.5f, 0.5f, 0.5f}, 2, 2);
            const auto m = depth_to_motion(d, {identity, identity});
            CHECK((m.u == 0.0f).all());
            CHECK((m.v == 0.0f).all());
            CHECK(m.stage == MotionStage::Scaled);
        }
        SUBCASE("identity params are the plain 2D - 1 map") {
            Rng rng(5);
            const DepthMap d = random_depth(rng, 7, 5);
            const auto m = depth_to_motion(d, {identity, identity});
            const Plane<float> expected = 2.0f * d.values - 1.0f;
            CHECK((m.u == expected).all());
            CHECK((m.v == expected).all());
        }
        SUBCASE("hand-evaluated 2x2") {
            const DepthMap d = depth_from({0.0f, 0.25f, 0.5f, 1.0f}, 2, 2);
            const auto m = depth_to_motion(d, {{true, 0.5, 0.5}, {false, -1.0, 1.0}});
            const float u[] = {0.75f, 0.5f, 0.25f, -0.25f};
            const float v[] = {-2.0f, -1.5f, -1.0f, 0.0f};
            for (int i = 0; i < 4; ++i) {
                CHECK(m.u.data()[i] == doctest::Approx(u[i]));
                CHECK(m.v.data()[i] == doctest::Approx(v[i]));
            }
        }
        SUBCASE("invalid params propagate") {
            const DepthMap d = depth_from({0.0f, 1.0f}, 2, 1);
            CHECK_THROWS_AS(depth_to_motion(d, {{false, 2.0, 1.0}, identity}), InvalidArgument);
            CHECK_THROWS_AS(depth_to_motion(d, {identity, {false, 0.0, -1.0}}), InvalidArgument);
        }
    }

    TEST_CASE("property: stage range chain and the eta bound") {
        Rng rng(17);
        for (int trial = 0; trial < 2000; ++trial) {
            const DepthMap d = random_depth(rng, uniform_int(rng, 1, 8), uniform_int(rng, 1, 8));
            const AugmentationParams p = random_params(rng);
            for (const AxisParams& a : {p.x, p.y}) {
                const Plane<float> r = reverse_map(d, a.delta);
                const Plane<float> s = shift_map(r, a.epsilon);
                const Plane<float> c = scale_map(s, a.eta);
                REQUIRE((r.abs() <= 1.0f).all());
                REQUIRE((s.abs() <= 2.0f).all());
                REQUIRE((c.abs() <= 2.0f).all());
                REQUIRE((c.abs() <= 2.0f * static_cast<float>(a.eta) * (1.0f + 1e-6f)).all());
            }
        }
    }

    TEST_CASE("property: each axis is affine in depth") {
        Rng rng(23);
        for (int trial = 0; trial < 500; ++trial) {
            const AxisParams a = random_axis(rng);
            DepthMap d;
            d.values.resize(1, 3);
            d.values << 0.0f, 1.0f, static_cast<float>(uniform(rng, 0.0, 1.0));
            const Plane<float> m = axis_motion(d.values, a);
            const double sign = a.delta ? -1.0 : 1.0;
            const double slope = m(0, 1) - m(0, 0);
            const double intercept = m(0, 0);
            REQUIRE(slope == doctest::Approx(sign * 2.0 * a.eta).epsilon(1e-5));
            REQUIRE(intercept == doctest::Approx(a.eta * (a.epsilon - sign)).epsilon(1e-5));
            REQUIRE(m(0, 2) == doctest::Approx(slope * d.values(0, 2) + intercept).epsilon(1e-5));
        }
    }

    TEST_CASE("determinism is bitwise") {
        Rng rng(29);
        const DepthMap d = random_depth(rng, 33, 17);
        const AugmentationParams p = sample_augmentation(derive_sample_seed({9, "frame"}));
        const auto a = depth_to_motion(d, p);
        const auto b = depth_to_motion(d, p);
        CHECK(std::memcmp(a.u.data(), b.u.data(), sizeof(float) * a.u.size()) == 0);
        CHECK(std::memcmp(a.v.data(), b.v.data(), sizeof(float) * a.v.size()) == 0);
    }

    TEST_CASE("double instantiation agrees with float") {
        Rng rng(31);
        const DepthMap d = random_depth(rng, 9, 9);
        const AugmentationParams p = random_params(rng);
        const auto f = depth_to_motion<float>(d, p);
        const auto g = depth_to_motion<double>(d, p);
        CHECK(((f.u.cast<double>() - g.u).abs() < 1e-6).all());
        CHECK(((f.v.cast<double>() - g.v).abs() < 1e-6).all());
    }
}

TEST_CASE("degenerate depth converts to zero motion at every stage") {
    DepthMap d;
    d.values = Plane<float>::Zero(3, 4);
    d.degenerate = true;
    const AugmentationParams p{{false, 0.9, 0.8}, {true, -0.4, 0.5}};
    const auto stages = motion_stages(d, p);
    for (const auto* m : {&stages.reversed, &stages.shifted, &stages.scaled}) {
        CHECK(m->width() == 4);
        CHECK(m->height() == 3);
        CHECK(m->max_norm() == 0.0);
    }
    CHECK(depth_to_motion(d, p).max_norm() == 0.0);
    CHECK_THROWS_AS(motion_stages(d, {{false, 3.0, 0.5}, p.y}), InvalidArgument);

    d.degenerate = false;  // the same zeros as a real depth map move
    CHECK(depth_to_motion(d, p).max_norm() > 0.0);
}
