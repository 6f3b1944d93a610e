#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mrunet/raster.hpp"
#include "test_support.hpp"

using namespace mrunet;

namespace {

ImageSample sample_with(const Raster& image, const Raster& mask, const std::string& id = "s") {
    return ImageSample{image, mask, id};
}

// Pixel-coordinate definitions: a left-right mirror, and a counter-clockwise
// quarter turn that sends the top-right corner to the top-left.
Raster mirror_oracle(const Raster& in) {
    Raster out(in.width, in.height, in.channels);
    for (std::size_t y = 0; y < in.height; ++y)
        for (std::size_t x = 0; x < in.width; ++x)
            for (std::size_t c = 0; c < in.channels; ++c) out.at(in.width - 1 - x, y, c) = in.at(x, y, c);
    return out;
}

Raster ccw_oracle(const Raster& in) {
    Raster out(in.height, in.width, in.channels);
    for (std::size_t y = 0; y < in.height; ++y)
        for (std::size_t x = 0; x < in.width; ++x)
            for (std::size_t c = 0; c < in.channels; ++c) out.at(y, in.width - 1 - x, c) = in.at(x, y, c);
    return out;
}

Raster dihedral_oracle(Dihedral d, Raster r) {
    if (d.flip) r = mirror_oracle(r);
    for (int i = 0; i < d.quarter_turns; ++i) r = ccw_oracle(r);
    return r;
}

} // namespace

TEST(Normalize, MinMaxEndpointsAndMidpoint) {
    Raster r(3, 1, 1);
    r.samples = {10, 110, 60};
    const auto v = normalize(r, {10, 110, NormMode::MinMax});
    EXPECT_DOUBLE_EQ(v[0], 0.0);
    EXPECT_DOUBLE_EQ(v[1], 1.0);
    EXPECT_DOUBLE_EQ(v[2], 0.5);
}

TEST(Normalize, ClampsOutOfRange) {
    Raster r(2, 1, 1);
    r.samples = {0, 255};
    const auto v = normalize(r, {10, 110, NormMode::MinMax});
    EXPECT_EQ(v[0], 0.0f);
    EXPECT_EQ(v[1], 1.0f);
}

TEST(Normalize, Rgb255IsPlanar) {
    Raster r(2, 1, 3);
    r.samples = {255, 0, 51, 102, 204, 255};
    const auto v = normalize(r, {0, 255, NormMode::Rgb255});
    ASSERT_EQ(v.size(), 6u);
    EXPECT_FLOAT_EQ(v[0], 1.0f);      // R of pixel 0
    EXPECT_FLOAT_EQ(v[1], 0.4f);      // R of pixel 1
    EXPECT_FLOAT_EQ(v[2], 0.0f);      // G of pixel 0
    EXPECT_FLOAT_EQ(v[5], 1.0f);      // B of pixel 1
}

TEST(Normalize, InvalidRange) {
    Raster r(1, 1, 1);
    EXPECT_THROW(normalize(r, {50, 50, NormMode::MinMax}), ValidationError);
    EXPECT_THROW(normalize(r, {60, 50, NormMode::MinMax}), ValidationError);
}

TEST(Normalize, OutputAlwaysInUnitInterval) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const Raster r = test_util::random_raster(5, 4, 1, rng);
        for (float v : normalize(r, {40, 90, NormMode::MinMax})) {
            EXPECT_GE(v, 0.0f);
            EXPECT_LE(v, 1.0f);
        }
    }
}

TEST(NormParams, ForegroundRangeOverAllTrainingImages) {
    // Foreground intensities {30..80} and {50..120}; background outside that range.
    Raster a(51, 2, 1), am(51, 2, 1), b(71, 2, 1), bm(71, 2, 1);
    for (std::size_t x = 0; x < 51; ++x) {
        a.at(x, 0) = static_cast<std::uint8_t>(30 + x);
        am.at(x, 0) = 255;
        a.at(x, 1) = 250;
    }
    for (std::size_t x = 0; x < 71; ++x) {
        b.at(x, 0) = static_cast<std::uint8_t>(50 + x);
        bm.at(x, 0) = 255;
        b.at(x, 1) = 3;
    }
    const auto p = compute_norm_params({sample_with(a, am), sample_with(b, bm)}, NormRoi::ForegroundMask);
    EXPECT_EQ(p.i_min, 30);
    EXPECT_EQ(p.i_max, 120);
    EXPECT_EQ(p.mode, NormMode::MinMax);

    const auto whole = compute_norm_params({sample_with(a, am), sample_with(b, bm)}, NormRoi::WholeImage);
    EXPECT_EQ(whole.i_min, 3);
    EXPECT_EQ(whole.i_max, 250);

    // WholeImage ignores masks entirely.
    const auto no_masks = compute_norm_params({sample_with(a, Raster(51, 2, 1)), sample_with(b, Raster(71, 2, 1))},
                                              NormRoi::WholeImage);
    EXPECT_EQ(no_masks.i_min, whole.i_min);
    EXPECT_EQ(no_masks.i_max, whole.i_max);
}

TEST(NormParams, Errors) {
    EXPECT_THROW(compute_norm_params({sample_with(Raster(4, 4, 1, 77), Raster(4, 4, 1, 255))}, NormRoi::WholeImage),
                 ValidationError);
    std::mt19937_64 rng(1);
    EXPECT_THROW(compute_norm_params({sample_with(test_util::random_raster(4, 4, 1, rng), Raster(4, 4, 1))},
                                     NormRoi::ForegroundMask),
                 ValidationError);
    EXPECT_THROW(compute_norm_params({}, NormRoi::WholeImage), ValidationError);
}

TEST(Resize, SameSizeIsIdentity) {
    std::mt19937_64 rng(2);
    const Raster r = test_util::random_raster(9, 7, 3, rng);
    EXPECT_EQ(resize_bicubic(r, 9, 7), r);
}

TEST(Resize, ConstantStaysConstant) {
    const Raster r(5, 6, 1, 123);
    for (auto [w, h] : {std::pair{17, 3}, std::pair{2, 2}, std::pair{64, 64}}) {
        const Raster out = resize_bicubic(r, w, h);
        EXPECT_EQ(out, Raster(w, h, 1, 123));
    }
}

TEST(Resize, LinearRampStaysLinear) {
    Raster ramp(16, 4, 1);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 16; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(10 + 12 * x);
    const Raster up = resize_bicubic(ramp, 32, 8);
    // Sample centres map back to source position (x + 0.5) / 2 - 0.5; away from
    // the clamped edges Catmull-Rom reproduces the line exactly.
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 3; x < 29; ++x) {
            const double src = (x + 0.5) / 2.0 - 0.5;
            EXPECT_NEAR(up.at(x, y), 10 + 12 * src, 1.0) << x;
        }
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 4; x < 28; ++x) {
            EXPECT_NEAR(up.at(x + 1, y) - up.at(x, y), 6, 1);
        }
}

TEST(Resize, MaskStaysBinary) {
    std::mt19937_64 rng(3);
    const Raster m = test_util::random_mask(13, 11, rng);
    const Raster out = resize_mask(m, 40, 29);
    for (auto v : out.samples) EXPECT_TRUE(v == 0 || v == 255);
    EXPECT_THROW(resize_bicubic(m, 1, 5), ValidationError);
    EXPECT_THROW(resize_bicubic(m, 5, 0), ValidationError);
}

TEST(Dihedral, MatchesCoordinateOracle) {
    std::mt19937_64 rng(4);
    const Raster r = test_util::random_raster(5, 5, 3, rng);
    for (Dihedral d : Dihedral::all()) {
        EXPECT_EQ(apply(d, r), dihedral_oracle(d, r)) << d.name();
    }
}

TEST(Dihedral, EightDistinctOnAsymmetricMarker) {
    Raster marker(2, 2, 1);
    marker.samples = {1, 2, 3, 4};
    std::set<std::vector<std::uint8_t>> seen;
    std::set<std::string> names;
    for (Dihedral d : Dihedral::all()) {
        seen.insert(apply(d, marker).samples);
        names.insert(d.name());
    }
    EXPECT_EQ(seen.size(), 8u);
    EXPECT_EQ(names.size(), 8u);
}

TEST(Dihedral, CompositionTableAndInverse) {
    std::mt19937_64 rng(5);
    const Raster r = test_util::random_raster(4, 4, 1, rng);
    const auto all = Dihedral::all();
    for (Dihedral a : all) {
        EXPECT_EQ(apply(inverse(a), apply(a, r)), r) << a.name();
        EXPECT_EQ(compose(a, inverse(a)), Dihedral{});
        for (Dihedral b : all) {
            const Dihedral ab = compose(a, b);
            EXPECT_EQ(apply(ab, r), apply(a, apply(b, r))) << a.name() << " * " << b.name();
            // Closure: the product is one of the eight elements.
            EXPECT_NE(std::find(all.begin(), all.end(), ab), all.end());
        }
    }
    // r90 * fh = fh * r270 (reflection conjugates rotation to its inverse).
    const Dihedral r90{1, false}, r270{3, false}, fh{0, true};
    EXPECT_EQ(compose(r90, fh), compose(fh, r270));
}

TEST(Augment, PairsImageAndMaskTransforms) {
    std::mt19937_64 rng(6);
    const Raster image = test_util::random_raster(6, 6, 1, rng);
    Raster mask(6, 6, 1);
    for (std::size_t i = 0; i < mask.samples.size(); ++i) mask.samples[i] = image.samples[i] >= 128 ? 255 : 0;
    const auto out = dihedral_augment(sample_with(image, mask, "case7"));
    ASSERT_EQ(out.size(), 8u);
    std::set<std::string> ids;
    const auto all = Dihedral::all();
    for (std::size_t k = 0; k < 8; ++k) {
        ids.insert(out[k].id);
        EXPECT_EQ(out[k].id, "case7_" + all[k].name());
        EXPECT_EQ(out[k].image, apply(all[k], image));
        for (std::size_t i = 0; i < 36; ++i) {
            EXPECT_EQ(out[k].mask.samples[i], out[k].image.samples[i] >= 128 ? 255 : 0);
        }
    }
    EXPECT_EQ(ids.size(), 8u);
}

TEST(Augment, ConstantImageStillEmitsEight) {
    const auto out = dihedral_augment(sample_with(Raster(4, 4, 1, 9), Raster(4, 4, 1, 255)));
    ASSERT_EQ(out.size(), 8u);
    for (const auto& s : out) EXPECT_EQ(s.image, Raster(4, 4, 1, 9));
}

TEST(Augment, NonSquareIsResizedFirst) {
    std::mt19937_64 rng(7);
    const auto out = dihedral_augment(sample_with(test_util::random_raster(8, 4, 1, rng), test_util::random_mask(8, 4, rng)));
    ASSERT_EQ(out.size(), 8u);
    for (const auto& s : out) {
        EXPECT_EQ(s.image.width, 8u);
        EXPECT_EQ(s.image.height, 8u);
        for (auto v : s.mask.samples) EXPECT_TRUE(v == 0 || v == 255);
    }
    EXPECT_THROW(apply(Dihedral{1, false}, Raster(3, 2, 1)), ValidationError);
}

TEST(ImageSample, ValidationErrors) {
    EXPECT_THROW(sample_with(Raster(4, 4, 1), Raster(4, 4, 1, 7)).validate(), ValidationError);
    EXPECT_THROW(sample_with(Raster(4, 4, 1), Raster(4, 3, 1)).validate(), ValidationError);
    EXPECT_THROW(sample_with(Raster(4, 4, 1), Raster(4, 4, 3)).validate(), ValidationError);
    Raster broken(2, 2, 1);
    broken.samples.pop_back();
    EXPECT_THROW(broken.validate(), ValidationError);
}
