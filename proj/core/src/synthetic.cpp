#include "mrunet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace mrunet {
namespace {

// Distribution helpers built on raw engine output so the data stays identical
// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

bool place(std::vector<Ellipse>& placed, Ellipse candidate, double size) {
    const double r = std::max(candidate.semi_x, candidate.semi_y);
    if (candidate.cx - r < 1 || candidate.cy - r < 1 || candidate.cx + r > size - 2 || candidate.cy + r > size - 2) {
        return false;
    }
    for (const auto& e : placed) {
        const double gap = std::hypot(e.cx - candidate.cx, e.cy - candidate.cy) - r - std::max(e.semi_x, e.semi_y);
        if (gap < 2.5) {
            return false;
        }
    }
    placed.push_back(candidate);
    return true;
}

Ellipse random_ellipse(Rng& rng, double size, double min_semi, double max_semi) {
    Ellipse e;
    e.semi_x = rng.uniform(min_semi, max_semi);
    e.semi_y = rng.uniform(min_semi, max_semi);
    e.angle = rng.uniform(0.0, std::numbers::pi);
    const double r = std::max(e.semi_x, e.semi_y);
    e.cx = rng.uniform(r + 1, size - r - 2);
    e.cy = rng.uniform(r + 1, size - r - 2);
    return e;
}

} // namespace

bool Ellipse::contains(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double u = (dx * c + dy * s) / semi_x;
    const double v = (-dx * s + dy * c) / semi_y;
    return u * u + v * v <= 1.0;
}

SyntheticScene synthetic_scene(std::size_t size, std::uint64_t seed, bool multi_scale) {
    if (size < 8 || size % 8 != 0) {
        throw ValidationError("synthetic image size must be a positive multiple of 8, got " + std::to_string(size));
    }
    Rng rng(seed);
    const auto side = static_cast<double>(size);
    std::vector<Ellipse> ellipses;

    if (multi_scale) {
        while (ellipses.empty()) {
            place(ellipses, random_ellipse(rng, side, side / 6.0, side / 4.0), side);
        }
        const std::size_t small = 2 + rng.below(3);
        const double max_small = side / 24.0;
        const double min_small = std::min(1.5, max_small);
        for (int attempts = 0; ellipses.size() < 1 + small; ++attempts) {
            if (attempts > 10000) {
                throw ValidationError("cannot place small structures in a " + std::to_string(size) + " image");
            }
            place(ellipses, random_ellipse(rng, side, min_small, max_small), side);
        }
    } else {
        const std::size_t count = 1 + rng.below(3);
        for (int attempts = 0; ellipses.size() < count && attempts < 1000; ++attempts) {
            place(ellipses, random_ellipse(rng, side, side / 16.0, side / 5.0), side);
        }
    }

    // Low-frequency sinusoidal texture plus Gaussian noise; structures are brighter.
    const double fx = rng.uniform(1.0, 3.0), fy = rng.uniform(1.0, 3.0), phase = rng.uniform(0.0, 6.28);
    const double background = rng.uniform(55.0, 85.0);
    const double foreground = rng.uniform(140.0, 170.0);
    ImageSample sample{Raster(size, size, 1), Raster(size, size, 1), ""};
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const auto px = static_cast<double>(x), py = static_cast<double>(y);
            const bool inside = std::any_of(ellipses.begin(), ellipses.end(),
                                            [&](const Ellipse& e) { return e.contains(px, py); });
            const double texture =
                18.0 * std::sin(2.0 * std::numbers::pi * (fx * px + fy * py) / side + phase);
            const double level = (inside ? foreground : background) + texture + 12.0 * rng.normal();
            sample.image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(level), 0.0, 255.0));
            sample.mask.at(x, y) = inside ? 255 : 0;
        }
    }
    return {std::move(sample), std::move(ellipses)};
}

std::vector<ImageSample> gen_synthetic(std::size_t count, std::size_t size, std::uint64_t seed, bool multi_scale) {
    if (count < 4) {
        throw ValidationError("gen_synthetic needs at least 4 samples, got " + std::to_string(count));
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::vector<std::uint32_t> seeds(2 * count);
    seq.generate(seeds.begin(), seeds.end());
    std::vector<ImageSample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t scene_seed = (static_cast<std::uint64_t>(seeds[2 * i]) << 32) | seeds[2 * i + 1];
        SyntheticScene scene = synthetic_scene(size, scene_seed, multi_scale);
        char id[32];
        std::snprintf(id, sizeof(id), "synth_%04zu", i);
        scene.sample.id = id;
        out.push_back(std::move(scene.sample));
    }
    return out;
}

} // namespace mrunet
