#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "mrunet/image_io.hpp"
#include "test_support.hpp"

using namespace mrunet;
using mrunet::test_util::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

} // namespace

TEST(ImageIo, AsciiAndBinaryPgm) {
    TempDir dir;
    write_text(dir / "a.pgm", "P2\n# comment\n4 4\n255\n0 1 2 3\n4 5 6 7\n8 9 10 11\n12 13 14 255\n");
    const Raster r = load_raster(dir / "a.pgm");
    EXPECT_EQ(r.channels, 1u);
    EXPECT_EQ(r.samples.size(), 16u);
    EXPECT_EQ(r.at(3, 3), 255);
    EXPECT_EQ(r.at(1, 2), 9);

    std::mt19937_64 rng(1);
    const Raster rnd = test_util::random_raster(5, 3, 1, rng);
    save_pnm(rnd, dir / "b.pgm");
    EXPECT_EQ(load_raster(dir / "b.pgm"), rnd);
}

TEST(ImageIo, SixteenBitPnmMapsFullRange) {
    TempDir dir;
    std::string data = "P5\n3 1\n65535\n";
    for (std::uint16_t v : {std::uint16_t{0}, std::uint16_t{32768}, std::uint16_t{65535}}) {
        data.push_back(static_cast<char>(v >> 8));
        data.push_back(static_cast<char>(v & 0xff));
    }
    write_text(dir / "w.pgm", data);
    const Raster r = load_raster(dir / "w.pgm");
    EXPECT_EQ(r.samples, (std::vector<std::uint8_t>{0, 128, 255}));

    write_text(dir / "m.pgm", "P2\n2 1\n1023\n1023 511\n");
    const Raster m = load_raster(dir / "m.pgm");
    EXPECT_EQ(m.samples, (std::vector<std::uint8_t>{255, 127}));
}

TEST(ImageIo, RescaleRoundsHalfUp) {
    EXPECT_EQ(rescale_to_8bit(65535, 65535), 255);
    EXPECT_EQ(rescale_to_8bit(0, 65535), 0);
    EXPECT_EQ(rescale_to_8bit(1, 2), 128);  // 127.5 rounds up
    EXPECT_EQ(rescale_to_8bit(128, 255), 128);
}

TEST(ImageIo, PngRoundTripGrayAndRgb) {
    TempDir dir;
    std::mt19937_64 rng(2);
    for (std::size_t c : {1u, 3u}) {
        const Raster r = test_util::random_raster(7, 5, c, rng);
        const auto path = dir / ("r" + std::to_string(c) + ".png");
        save_png(r, path);
        const Raster back = load_raster(path);
        EXPECT_EQ(back.channels, c);
        EXPECT_EQ(back, r);
    }
    const Raster rgb = test_util::random_raster(4, 4, 3, rng);
    save_pnm(rgb, dir / "c.ppm");
    EXPECT_EQ(load_raster(dir / "c.ppm"), rgb);
}

TEST(ImageIo, Errors) {
    TempDir dir;
    EXPECT_THROW(load_raster(dir / "missing.png"), IoError);
    write_text(dir / "junk.png", "definitely not an image");
    EXPECT_THROW(load_raster(dir / "junk.png"), FormatError);
    write_text(dir / "short.pgm", "P5\n4 4\n255\nab");
    EXPECT_THROW(load_raster(dir / "short.pgm"), FormatError);
    std::string png_head = "\x89PNG\r\n\x1a\n";
    write_text(dir / "trunc.png", png_head + "xxxx");
    EXPECT_THROW(load_raster(dir / "trunc.png"), FormatError);
    EXPECT_THROW(save_png(Raster(2, 2, 1), "/nonexistent-dir/x.png"), IoError);
}
