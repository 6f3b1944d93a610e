#include "mrunet/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mrunet {

void Raster::validate() const {
    if (width == 0 || height == 0) {
        throw ValidationError("raster dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
        throw ValidationError("raster must have 1 or 3 channels, got " + std::to_string(channels));
    }
    if (samples.size() != width * height * channels) {
        throw ValidationError("raster sample count does not match its dimensions");
    }
}

void ImageSample::validate() const {
    image.validate();
    mask.validate();
    if (mask.channels != 1) {
        throw ValidationError("mask '" + id + "' must be single-channel");
    }
    if (image.width != mask.width || image.height != mask.height) {
        throw ValidationError("image and mask '" + id + "' differ in size");
    }
    for (std::uint8_t v : mask.samples) {
        if (v != 0 && v != 255) {
            throw ValidationError("mask '" + id + "' is not binary (values must be 0 or 255)");
        }
    }
}

void NormalizationParams::validate() const {
    if (mode == NormMode::MinMax && !(i_min < i_max)) {
        throw ValidationError("normalization needs i_min < i_max, got [" + std::to_string(i_min) + ", " +
                              std::to_string(i_max) + "]");
    }
}

std::vector<float> normalize(const Raster& input, const NormalizationParams& params) {
    params.validate();
    input.validate();
    const std::size_t plane = input.width * input.height;
    std::vector<float> out(plane * input.channels);
    for (std::size_t p = 0; p < plane; ++p) {
        for (std::size_t c = 0; c < input.channels; ++c) {
            const double v = input.samples[p * input.channels + c];
            double scaled = params.mode == NormMode::Rgb255 ? v / 255.0
                                                            : (v - params.i_min) / (params.i_max - params.i_min);
            out[c * plane + p] = static_cast<float>(std::clamp(scaled, 0.0, 1.0));
        }
    }
    return out;
}

NormalizationParams compute_norm_params(const std::vector<ImageSample>& training, NormRoi roi) {
    if (training.empty()) {
        throw ValidationError("compute_norm_params: no training samples");
    }
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const auto& s : training) {
        s.validate();
        if (s.image.channels != 1) {
            throw ValidationError("compute_norm_params: min-max normalization needs grayscale images");
        }
        for (std::size_t p = 0; p < s.image.samples.size(); ++p) {
            if (roi == NormRoi::ForegroundMask && s.mask.samples[p] == 0) {
                continue;
            }
            lo = std::min<int>(lo, s.image.samples[p]);
            hi = std::max<int>(hi, s.image.samples[p]);
        }
    }
    if (lo > hi) {
        throw ValidationError("compute_norm_params: every training mask is empty");
    }
    NormalizationParams params{static_cast<double>(lo), static_cast<double>(hi), NormMode::MinMax};
    params.validate();
    return params;
}

namespace {

double catmull_rom(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) {
        return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    }
    if (t < 2.0) {
        return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    }
    return 0.0;
}

struct Taps {
    std::array<std::size_t, 4> index;
    std::array<double, 4> weight;
};

std::vector<Taps> make_taps(std::size_t in, std::size_t out) {
    std::vector<Taps> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t i = 0; i < out; ++i) {
        const double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const double frac = src - base;
        for (int k = 0; k < 4; ++k) {
            const auto pos = static_cast<long long>(base) + k - 1;
            taps[i].index[k] = static_cast<std::size_t>(std::clamp<long long>(pos, 0, static_cast<long long>(in) - 1));
            taps[i].weight[k] = catmull_rom(frac - (k - 1));
        }
    }
    return taps;
}

} // namespace

Raster resize_bicubic(const Raster& input, std::size_t target_w, std::size_t target_h) {
    input.validate();
    if (target_w < 2 || target_h < 2) {
        throw ValidationError("resize target must be at least 2x2");
    }
    if (target_w == input.width && target_h == input.height) {
        return input;
    }
    const std::size_t c = input.channels;
    const auto xs = make_taps(input.width, target_w);
    const auto ys = make_taps(input.height, target_h);

    // Horizontal pass into doubles, then vertical pass with rounding.
    std::vector<double> rows(input.height * target_w * c);
    for (std::size_t y = 0; y < input.height; ++y) {
        for (std::size_t x = 0; x < target_w; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    acc += xs[x].weight[k] * input.at(xs[x].index[k], y, ch);
                }
                rows[(y * target_w + x) * c + ch] = acc;
            }
        }
    }
    Raster out(target_w, target_h, c);
    for (std::size_t y = 0; y < target_h; ++y) {
        for (std::size_t x = 0; x < target_w; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    acc += ys[y].weight[k] * rows[(ys[y].index[k] * target_w + x) * c + ch];
                }
                out.at(x, y, ch) = static_cast<std::uint8_t>(std::clamp(std::floor(acc + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

Raster resize_mask(const Raster& mask, std::size_t target_w, std::size_t target_h) {
    Raster out = resize_bicubic(mask, target_w, target_h);
    for (auto& v : out.samples) {
        v = v >= 128 ? 255 : 0;
    }
    return out;
}

ImageSample resize_sample(const ImageSample& sample, std::size_t target_w, std::size_t target_h) {
    return {resize_bicubic(sample.image, target_w, target_h), resize_mask(sample.mask, target_w, target_h),
            sample.id};
}

std::array<Dihedral, 8> Dihedral::all() {
    std::array<Dihedral, 8> out{};
    for (std::uint8_t i = 0; i < 8; ++i) {
        out[i] = Dihedral{static_cast<std::uint8_t>(i % 4), i >= 4};
    }
    return out;
}

// Elements are r^k s^f with s r = r^-1 s, so
// (r^a s^f)(r^b s^g) = r^(a + (f ? -b : b)) s^(f xor g).
Dihedral compose(Dihedral a, Dihedral b) {
    const int turns = a.flip ? a.quarter_turns - b.quarter_turns : a.quarter_turns + b.quarter_turns;
    return Dihedral{static_cast<std::uint8_t>(((turns % 4) + 4) % 4), a.flip != b.flip};
}

Dihedral inverse(Dihedral d) {
    if (d.flip) {
        return d;
    }
    return Dihedral{static_cast<std::uint8_t>((4 - d.quarter_turns) % 4), false};
}

std::string Dihedral::name() const {
    static constexpr const char* kTurns[] = {"", "r90", "r180", "r270"};
    if (!flip) {
        return quarter_turns == 0 ? "id" : kTurns[quarter_turns];
    }
    return quarter_turns == 0 ? "fh" : std::string("fh-") + kTurns[quarter_turns];
}

Raster apply(Dihedral d, const Raster& input) {
    input.validate();
    if (input.width != input.height) {
        throw ValidationError("dihedral transforms need a square raster, got " + std::to_string(input.width) +
                              "x" + std::to_string(input.height));
    }
    const std::size_t n = input.width;
    const std::size_t last = n - 1;
    Raster out(n, n, input.channels);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            // Walk the output pixel back through the inverse rotations, then the flip.
            std::size_t sx = x, sy = y;
            for (int k = 0; k < d.quarter_turns; ++k) {
                // Counter-clockwise turn: out(x, y) = in(last - y, x).
                const std::size_t px = last - sy;
                const std::size_t py = sx;
                sx = px;
                sy = py;
            }
            if (d.flip) {
                sx = last - sx;
            }
            for (std::size_t c = 0; c < input.channels; ++c) {
                out.at(x, y, c) = input.at(sx, sy, c);
            }
        }
    }
    return out;
}

std::vector<ImageSample> dihedral_augment(const ImageSample& sample) {
    sample.validate();
    ImageSample square = sample;
    if (sample.image.width != sample.image.height) {
        const std::size_t side = std::max(sample.image.width, sample.image.height);
        square = resize_sample(sample, side, side);
    }
    std::vector<ImageSample> out;
    out.reserve(8);
    for (const Dihedral d : Dihedral::all()) {
        out.push_back({apply(d, square.image), apply(d, square.mask), square.id + "_" + d.name()});
    }
    return out;
}

} // namespace mrunet
