#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mrunet/net.hpp"
#include "mrunet/ops.hpp"
#include "test_support.hpp"

using namespace mrunet;
using mrunet::test_util::random_tensor;

namespace {

ArchitectureSpec make_spec(Variant v, std::size_t base, std::size_t in = 1) {
    ArchitectureSpec s;
    s.variant = v;
    s.base_channels = base;
    s.in_channels = in;
    return s;
}

std::vector<std::string> names(const Model<float>& m) {
    std::vector<std::string> out;
    for (const auto& p : m.parameters()) out.push_back(p.name);
    return out;
}

// Sum of Cout*Cin*k^2 + Cout written out level by level.
std::size_t closed_form_count(std::size_t b, std::size_t in, bool multires) {
    auto conv = [](std::size_t cin, std::size_t cout, std::size_t k) { return cout * cin * k * k + cout; };
    std::size_t total = 0;
    total += conv(in, b, 3) + conv(b, b, 3);
    total += conv(b + (multires ? 2 * b : 0), 2 * b, 3) + conv(2 * b, 2 * b, 3);
    total += conv(2 * b + (multires ? 4 * b : 0), 4 * b, 3) + conv(4 * b, 4 * b, 3);
    total += conv(4 * b + (multires ? 8 * b : 0), 8 * b, 3) + conv(8 * b, 8 * b, 3);
    if (multires) {
        total += conv(in, 2 * b, 3) + conv(2 * b, 2 * b, 3);
        total += conv(in, 4 * b, 3) + conv(4 * b, 4 * b, 3);
        total += conv(in, 8 * b, 3) + conv(8 * b, 8 * b, 3);
    }
    total += conv(8 * b, 4 * b, 2) + conv(8 * b, 4 * b, 3) + conv(4 * b, 4 * b, 3);
    total += conv(4 * b, 2 * b, 2) + conv(4 * b, 2 * b, 3) + conv(2 * b, 2 * b, 3);
    total += conv(2 * b, b, 2) + conv(2 * b, b, 3) + conv(b, b, 3);
    total += conv(b, 2, 1);
    return total;
}

} // namespace

TEST(ArchitectureSpec, ValidationErrors) {
    EXPECT_THROW(build_model<float>(make_spec(Variant::Unet, 0), 1), ValidationError);
    ArchitectureSpec s = make_spec(Variant::Unet, 4);
    s.levels = 3;
    EXPECT_THROW(s.validate(), ValidationError);
    s = make_spec(Variant::Unet, 4, 2);
    EXPECT_THROW(s.validate(), ValidationError);
    s = make_spec(Variant::Unet, 4);
    s.out_channels = 3;
    EXPECT_THROW(s.validate(), ValidationError);
    EXPECT_EQ(parse_variant("UNet"), Variant::Unet);
    EXPECT_EQ(parse_variant("mrunet"), Variant::MrUnet);
    EXPECT_THROW(parse_variant("vnet"), ValidationError);
}

TEST(Layout, UnetLayerNames) {
    const Model<float> m = build_model<float>(make_spec(Variant::Unet, 8), 1);
    std::set<std::string> expected;
    auto layer = [&expected](const std::string& l) {
        expected.insert(l + ".weight");
        expected.insert(l + ".bias");
    };
    for (int lvl = 1; lvl <= 4; ++lvl) {
        layer("enc" + std::to_string(lvl) + ".conv1");
        layer("enc" + std::to_string(lvl) + ".conv2");
    }
    for (int lvl = 1; lvl <= 3; ++lvl) {
        layer("up" + std::to_string(lvl));
        layer("dec" + std::to_string(lvl) + ".conv1");
        layer("dec" + std::to_string(lvl) + ".conv2");
    }
    layer("head");
    const auto got = names(m);
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), expected);
    EXPECT_EQ(got.size(), expected.size());
    EXPECT_EQ(got.size(), 36u);
}

TEST(Layout, MrUnetAddsSixConvLayers) {
    const auto u = layer_layout(make_spec(Variant::Unet, 8));
    const auto m = layer_layout(make_spec(Variant::MrUnet, 8));
    auto convs = [](const std::vector<LayerSpec>& l) {
        return std::count_if(l.begin(), l.end(), [](const LayerSpec& s) { return s.kind == LayerKind::Conv3x3; });
    };
    EXPECT_EQ(convs(m) - convs(u), 6);
    EXPECT_EQ(m.size() - u.size(), 6u);
    const Model<float> mu = build_model<float>(make_spec(Variant::Unet, 8), 1);
    const Model<float> mm = build_model<float>(make_spec(Variant::MrUnet, 8), 1);
    EXPECT_EQ(mm.parameters().size() - mu.parameters().size(), 12u);
}

TEST(Layout, UnetNamesAreStrictSubsetWithSharedShapesOutsideFusion) {
    const Model<float> u = build_model<float>(make_spec(Variant::Unet, 4), 1);
    const Model<float> m = build_model<float>(make_spec(Variant::MrUnet, 4), 1);
    std::size_t widened = 0;
    for (const auto& p : u.parameters()) {
        const Tensor<float>* other = m.find(p.name);
        ASSERT_NE(other, nullptr) << p.name;
        if (other->shape() != p.value.shape()) {
            // Only the first conv of a level that also receives auxiliary features differs.
            EXPECT_TRUE(p.name == "enc2.conv1.weight" || p.name == "enc3.conv1.weight" ||
                        p.name == "enc4.conv1.weight")
                << p.name;
            EXPECT_GT(other->dim(1), p.value.dim(1));
            ++widened;
        }
    }
    EXPECT_EQ(widened, 3u);
    EXPECT_GT(m.parameters().size(), u.parameters().size());
    for (const auto& p : m.parameters()) {
        if (u.find(p.name) == nullptr) {
            EXPECT_EQ(p.name.rfind("aux", 0), 0u) << p.name;
        }
    }
}

TEST(ParamCount, ClosedForm) {
    EXPECT_EQ(param_count(build_model<float>(make_spec(Variant::Unet, 1), 0)), 1942u);
    for (std::size_t b : {1u, 2u, 8u}) {
        for (std::size_t in : {1u, 3u}) {
            EXPECT_EQ(param_count(build_model<float>(make_spec(Variant::Unet, b, in), 0)),
                      closed_form_count(b, in, false));
            EXPECT_EQ(param_count(build_model<float>(make_spec(Variant::MrUnet, b, in), 0)),
                      closed_form_count(b, in, true));
            EXPECT_GT(param_count(build_model<float>(make_spec(Variant::MrUnet, b, in), 0)),
                      param_count(build_model<float>(make_spec(Variant::Unet, b, in), 0)));
        }
    }
}

TEST(Init, DeterministicHeNormal) {
    const Model<float> a = build_model<float>(make_spec(Variant::MrUnet, 8), 42);
    const Model<float> b = build_model<float>(make_spec(Variant::MrUnet, 8), 42);
    const Model<float> c = build_model<float>(make_spec(Variant::MrUnet, 8), 43);
    ASSERT_EQ(a.parameters().size(), b.parameters().size());
    bool differs = false;
    for (std::size_t i = 0; i < a.parameters().size(); ++i) {
        EXPECT_EQ(a.parameters()[i].value, b.parameters()[i].value);
        differs = differs || !(a.parameters()[i].value == c.parameters()[i].value);
    }
    EXPECT_TRUE(differs);

    // dec3.conv1 has fan_in 64*9; its sample sd should be near sqrt(2/576).
    const Tensor<float>& w = *a.find("dec3.conv1.weight");
    double s2 = 0;
    for (float v : w.values()) s2 += static_cast<double>(v) * v;
    EXPECT_NEAR(std::sqrt(s2 / static_cast<double>(w.size())), std::sqrt(2.0 / 576.0), 0.004);
    for (float v : a.find("dec3.conv1.bias")->values()) EXPECT_EQ(v, 0.0f);
}

TEST(Forward, PreservesSizeAndNormalises) {
    std::mt19937_64 rng(1);
    for (Variant v : {Variant::Unet, Variant::MrUnet}) {
        const Model<float> m = build_model<float>(make_spec(v, 4), 3);
        const Tensor<float> out = m.predict(random_tensor<float>({2, 1, 64, 64}, rng, 0, 1));
        ASSERT_EQ(out.shape(), (Shape{2, 2, 64, 64}));
        for (std::size_t n = 0; n < 2; ++n)
            for (std::size_t y = 0; y < 64; ++y)
                for (std::size_t x = 0; x < 64; ++x) {
                    const float p0 = out.at(n, 0, y, x), p1 = out.at(n, 1, y, x);
                    EXPECT_GT(p0, 0.0f);
                    EXPECT_GT(p1, 0.0f);
                    EXPECT_NEAR(static_cast<double>(p0) + p1, 1.0, 1e-6);
                }
    }
}

TEST(Forward, RgbInputAndNonSquare) {
    std::mt19937_64 rng(2);
    const Model<float> m = build_model<float>(make_spec(Variant::MrUnet, 2, 3), 3);
    EXPECT_EQ(m.predict(random_tensor<float>({1, 3, 16, 40}, rng, 0, 1)).shape(), (Shape{1, 2, 16, 40}));
}

TEST(Forward, BatchOrderPermutesOutputs) {
    std::mt19937_64 rng(3);
    const Model<float> m = build_model<float>(make_spec(Variant::MrUnet, 4), 5);
    const Tensor<float> batch = random_tensor<float>({3, 1, 16, 16}, rng, 0, 1);
    Tensor<float> permuted(batch.shape());
    const std::size_t plane = 16 * 16;
    const std::size_t order[3] = {2, 0, 1};
    for (std::size_t i = 0; i < 3; ++i) {
        std::copy_n(batch.data() + order[i] * plane, plane, permuted.data() + i * plane);
    }
    const Tensor<float> a = m.predict(batch);
    const Tensor<float> b = m.predict(permuted);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 2 * plane; ++j) {
            EXPECT_EQ(b[i * 2 * plane + j], a[order[i] * 2 * plane + j]);
        }
    }
}

TEST(Forward, ShapeErrors) {
    const Model<float> m = build_model<float>(make_spec(Variant::Unet, 2), 1);
    EXPECT_THROW(m.predict(Tensor<float>({1, 1, 63, 63})), ShapeError);
    EXPECT_THROW(m.predict(Tensor<float>({1, 1, 64, 60})), ShapeError);
    EXPECT_THROW(m.predict(Tensor<float>({1, 3, 64, 64})), ShapeError);
    EXPECT_THROW(m.predict(Tensor<float>({1, 64, 64})), ShapeError);
}

TEST(Forward, DeterministicReplay) {
    std::mt19937_64 rng(4);
    const Model<float> m = build_model<float>(make_spec(Variant::MrUnet, 4), 9);
    const Tensor<float> x = random_tensor<float>({2, 1, 32, 32}, rng, 0, 1);
    EXPECT_EQ(m.predict(x), m.predict(x));
}

TEST(Forward, TranslationCovarianceAwayFromBorders) {
    // Receptive-field radius of the four-level layout is 58 px; the comparison
    // window keeps that distance from the borders and from the wrap seam.
    constexpr std::size_t side = 192, shift = 8, radius = 58;
    std::mt19937_64 rng(5);
    for (Variant v : {Variant::Unet, Variant::MrUnet}) {
        const Model<double> m = build_model<double>(make_spec(v, 2), 11);
        const Tensor<double> x = random_tensor({1, 1, side, side}, rng, 0, 1);
        Tensor<double> shifted(x.shape());
        for (std::size_t y = 0; y < side; ++y)
            for (std::size_t xx = 0; xx < side; ++xx)
                shifted.at(0, 0, (y + shift) % side, (xx + shift) % side) = x.at(0, 0, y, xx);
        const Tensor<double> a = m.predict(x);
        const Tensor<double> b = m.predict(shifted);
        double worst = 0;
        for (std::size_t y = shift + radius; y < side - radius; ++y)
            for (std::size_t xx = shift + radius; xx < side - radius; ++xx)
                worst = std::max(worst, std::abs(b.at(0, 1, y, xx) - a.at(0, 1, y - shift, xx - shift)));
        EXPECT_LE(worst, 1e-4) << to_string(v);
    }
}

TEST(Convert, DoubleModelMatchesFloatParameters) {
    const Model<float> f = build_model<float>(make_spec(Variant::Unet, 2), 1);
    const Model<double> d = convert_model<double>(f);
    ASSERT_EQ(d.parameters().size(), f.parameters().size());
    EXPECT_EQ(d.parameters()[5].value, f.parameters()[5].value.cast<double>());
}

TEST(Model, RejectsForeignParameters) {
    const Model<float> u = build_model<float>(make_spec(Variant::Unet, 2), 1);
    EXPECT_THROW(Model<float>(make_spec(Variant::MrUnet, 2), u.parameters()), CompatibilityError);
    auto params = u.parameters();
    params[0].value = Tensor<float>({2, 1, 1, 1});
    EXPECT_THROW(Model<float>(make_spec(Variant::Unet, 2), params), CompatibilityError);
}
