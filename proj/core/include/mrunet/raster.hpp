#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mrunet/errors.hpp"

namespace mrunet {

/// 8-bit image, row-major with interleaved channels.
struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::vector<std::uint8_t> samples;

    Raster() = default;
    Raster(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), samples(w * h * c, fill) {}

    std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c = 0) {
        return samples[(y * width + x) * channels + c];
    }
    std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
        return samples[(y * width + x) * channels + c];
    }

    /// Throws ValidationError if dimensions and sample count disagree.
    void validate() const;

    friend bool operator==(const Raster&, const Raster&) = default;
};

/// An image with its binary reference mask (values 0 or 255).
struct ImageSample {
    Raster image;
    Raster mask;
    std::string id;

    void validate() const;
};

enum class NormMode { MinMax, Rgb255 };
enum class NormRoi { ForegroundMask, WholeImage };

struct NormalizationParams {
    double i_min = 0.0;
    double i_max = 255.0;
    NormMode mode = NormMode::Rgb255;

    void validate() const;
};

/// Maps intensities to [0,1]: (I - i_min) / (i_max - i_min) clamped, or I / 255.
/// Returns channel-planar values (C x H x W).
std::vector<float> normalize(const Raster& input, const NormalizationParams& params);

/// Intensity range over the training images, restricted to mask foreground when
/// roi is ForegroundMask. The result is always MinMax mode.
NormalizationParams compute_norm_params(const std::vector<ImageSample>& training, NormRoi roi);

/// Catmull-Rom (a = -0.5) bicubic resampling with clamped borders and 8-bit rounding.
Raster resize_bicubic(const Raster& input, std::size_t target_w, std::size_t target_h);

/// Bicubic resize followed by re-binarisation at 128 (output values 0 or 255).
Raster resize_mask(const Raster& mask, std::size_t target_w, std::size_t target_h);

/// Resizes image and mask together.
ImageSample resize_sample(const ImageSample& sample, std::size_t target_w, std::size_t target_h);

/// Element of the dihedral group of the square: `flip` (left-right mirror) is
/// applied first, then `quarter_turns` counter-clockwise rotations.
struct Dihedral {
    std::uint8_t quarter_turns = 0;
    bool flip = false;

    static std::array<Dihedral, 8> all();

    /// (a * b) applied to an image equals a applied to (b applied to the image).
    friend Dihedral compose(Dihedral a, Dihedral b);
    friend Dihedral inverse(Dihedral d);

    std::string name() const;

    friend bool operator==(const Dihedral&, const Dihedral&) = default;
};

Dihedral compose(Dihedral a, Dihedral b);
Dihedral inverse(Dihedral d);

/// Applies the transform to a square raster. Throws ValidationError when non-square.
Raster apply(Dihedral d, const Raster& input);

/// All 8 dihedral variants of a square sample, image and mask transformed alike.
/// Identifiers get a "_<transform>" suffix. Non-square samples are resized to
/// the larger side first.
std::vector<ImageSample> dihedral_augment(const ImageSample& sample);

} // namespace mrunet
