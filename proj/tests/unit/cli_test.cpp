#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "test_support.hpp"

using mrunet::test_util::TempDir;

namespace {

struct Outcome {
    int code = -1;
    std::string output;
};

Outcome run(const std::string& args, const TempDir& dir) {
    const auto log = dir / "cli_output.txt";
    const std::string cmd = std::string(MRUNET_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    Outcome out;
    out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    out.output = ss.str();
    return out;
}

} // namespace

TEST(Cli, HelpAndParseErrors) {
    TempDir dir;
    EXPECT_EQ(run("--help", dir).code, 0);
    EXPECT_EQ(run("", dir).code, 1);
    EXPECT_EQ(run("frobnicate", dir).code, 1);
    EXPECT_EQ(run("train --batch 0", dir).code, 1);
    EXPECT_EQ(run("train --arch vnet", dir).code, 1);
}

TEST(Cli, IoErrorsExitWithTwo) {
    TempDir dir;
    const Outcome missing = run("eval --checkpoint '" + (dir / "nope.mrun").string() + "'", dir);
    EXPECT_EQ(missing.code, 2) << missing.output;
    EXPECT_EQ(run("train --config '" + (dir / "none.json").string() + "'", dir).code, 2);
}

TEST(Cli, SynthWritesDataset) {
    TempDir dir;
    const Outcome o = run("synth --count 5 --size 32 --seed 3 --out '" + (dir / "ds").string() + "'", dir);
    ASSERT_EQ(o.code, 0) << o.output;
    std::size_t images = 0, masks = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "ds" / "images")) images += e.is_regular_file();
    for (const auto& e : std::filesystem::directory_iterator(dir / "ds" / "masks")) masks += e.is_regular_file();
    EXPECT_EQ(images, 5u);
    EXPECT_EQ(masks, 5u);
    EXPECT_EQ(run("synth --count 5 --size 30 --out '" + (dir / "bad").string() + "'", dir).code, 1);
}

TEST(Cli, TrainEvalPredictRoundTrip) {
    TempDir dir;
    const std::string out = (dir / "run").string();
    const Outcome t = run("train --desk --base-channels 2 --epochs 2 --quiet --out '" + out + "'", dir);
    ASSERT_EQ(t.code, 0) << t.output;
    const std::string ckpt = (dir / "run" / "best.mrun").string();
    const Outcome e = run("eval --desk --checkpoint '" + ckpt + "' --out '" + out + "'", dir);
    ASSERT_EQ(e.code, 0) << e.output;
    EXPECT_NE(e.output.find("dsc"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "run" / "metrics_test.csv"));

    run("synth --count 4 --size 64 --out '" + (dir / "ds").string() + "'", dir);
    const auto image = (dir / "ds" / "images" / "synth_0000.png").string();
    const Outcome p = run("predict --checkpoint '" + ckpt + "' --image '" + image + "' --out '" +
                              (dir / "m.png").string() + "'",
                          dir);
    EXPECT_EQ(p.code, 0) << p.output;
    EXPECT_TRUE(std::filesystem::exists(dir / "m.png"));

    // A U-Net checkpoint handed to an mrU-Net configuration is a compatibility error.
    const Outcome mismatch = run("eval --desk --arch mrunet --base-channels 2 --checkpoint '" + ckpt + "'", dir);
    EXPECT_EQ(mismatch.code, 2) << mismatch.output;
}

TEST(Cli, DivergenceExitsWithThree) {
    TempDir dir;
    std::ofstream(dir / "cfg.json") << R"({"lr": 1e300, "base_channels": 2, "max_epochs": 20})";
    const Outcome o = run("train --desk --quiet --config '" + (dir / "cfg.json").string() + "' --out '" +
                              (dir / "run").string() + "'",
                          dir);
    EXPECT_EQ(o.code, 3) << o.output;
}

TEST(Cli, GradCheckReportsOk) {
    TempDir dir;
    const Outcome o = run("gradcheck --arch unet --base-channels 2 --size 8 --seeds 1", dir);
    EXPECT_EQ(o.code, 0) << o.output;
    EXPECT_NE(o.output.find("ok"), std::string::npos);
}
