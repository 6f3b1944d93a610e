#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <queue>

#include "mrunet/synthetic.hpp"

using namespace mrunet;

namespace {

// Areas of the 8-connected foreground components of a mask.
std::vector<std::size_t> component_areas(const Raster& mask) {
    const std::size_t w = mask.width, h = mask.height;
    std::vector<int> seen(w * h, 0);
    std::vector<std::size_t> areas;
    for (std::size_t start = 0; start < w * h; ++start) {
        if (mask.samples[start] == 0 || seen[start]) continue;
        std::size_t area = 0;
        std::queue<std::size_t> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const std::size_t p = q.front();
            q.pop();
            ++area;
            const long px = static_cast<long>(p % w), py = static_cast<long>(p / w);
            for (long dy = -1; dy <= 1; ++dy)
                for (long dx = -1; dx <= 1; ++dx) {
                    const long nx = px + dx, ny = py + dy;
                    if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
                    const std::size_t n = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
                    if (mask.samples[n] != 0 && !seen[n]) {
                        seen[n] = 1;
                        q.push(n);
                    }
                }
        }
        areas.push_back(area);
    }
    return areas;
}

} // namespace

TEST(Synthetic, SameSeedIsBitwiseIdentical) {
    const auto a = gen_synthetic(6, 32, 77, true);
    const auto b = gen_synthetic(6, 32, 77, true);
    ASSERT_EQ(a.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(a[i].id, b[i].id);
        EXPECT_EQ(a[i].image, b[i].image);
        EXPECT_EQ(a[i].mask, b[i].mask);
    }
    EXPECT_EQ(a[0].id, "synth_0000");
    EXPECT_NE(gen_synthetic(6, 32, 78, true)[0].image, a[0].image);
}

TEST(Synthetic, MaskMarksEllipseInteriors) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (bool ms : {true, false}) {
            const SyntheticScene scene = synthetic_scene(64, seed, ms);
            const Raster& m = scene.sample.mask;
            for (std::size_t y = 0; y < 64; ++y)
                for (std::size_t x = 0; x < 64; ++x) {
                    bool inside = false;
                    for (const auto& e : scene.ellipses) {
                        const double c = std::cos(e.angle), s = std::sin(e.angle);
                        const double dx = static_cast<double>(x) - e.cx, dy = static_cast<double>(y) - e.cy;
                        const double u = (c * dx + s * dy) / e.semi_x, v = (-s * dx + c * dy) / e.semi_y;
                        inside = inside || u * u + v * v <= 1.0;
                    }
                    ASSERT_EQ(m.at(x, y), inside ? 255 : 0) << x << "," << y;
                }
        }
    }
}

TEST(Synthetic, MultiScaleComponents) {
    for (std::size_t size : {64u, 128u}) {
        const double large = std::pow(size / 6.0, 2) * std::numbers::pi / 4.0;
        const double small = std::pow(size / 24.0, 2) * std::numbers::pi * 4.0;
        for (const auto& s : gen_synthetic(20, size, 5, true)) {
            const auto areas = component_areas(s.mask);
            const auto big = std::count_if(areas.begin(), areas.end(), [&](std::size_t a) { return a >= large; });
            const auto tiny = std::count_if(areas.begin(), areas.end(), [&](std::size_t a) { return a <= small; });
            EXPECT_GE(big, 1) << s.id;
            EXPECT_GE(tiny, 2) << s.id;
        }
    }
}

TEST(Synthetic, ImagesAreGrayscaleAndMasksBinary) {
    for (const auto& s : gen_synthetic(4, 32, 1, false)) {
        EXPECT_EQ(s.image.channels, 1u);
        EXPECT_NO_THROW(s.validate());
    }
}

TEST(Synthetic, Errors) {
    EXPECT_THROW(gen_synthetic(4, 60, 1, true), ValidationError);
    EXPECT_THROW(gen_synthetic(4, 0, 1, true), ValidationError);
    EXPECT_THROW(gen_synthetic(3, 64, 1, true), ValidationError);
}
