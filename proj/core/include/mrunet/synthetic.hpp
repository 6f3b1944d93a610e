#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mrunet/raster.hpp"

namespace mrunet {

struct Ellipse {
    double cx = 0;
    double cy = 0;
    double semi_x = 1;
    double semi_y = 1;
    double angle = 0;

    /// Whether the pixel at integer coordinates (x, y) lies inside.
    bool contains(double x, double y) const;
};

struct SyntheticScene {
    ImageSample sample;
    std::vector<Ellipse> ellipses;
};

/// One noisy grayscale image of filled ellipses on a textured background.
///
/// In multi-scale mode the scene holds one large ellipse (diameter >= size/3)
/// and 2-4 small ones (diameter <= size/12); otherwise 1-3 medium ellipses.
/// Ellipses never touch, so each forms its own connected mask component.
SyntheticScene synthetic_scene(std::size_t size, std::uint64_t seed, bool multi_scale);

/// `count` scenes with ids "synth_0000", ...; bitwise reproducible from seed.
std::vector<ImageSample> gen_synthetic(std::size_t count, std::size_t size, std::uint64_t seed, bool multi_scale);

} // namespace mrunet
