#include <benchmark/benchmark.h>

#include <random>

#include "mrunet/loss.hpp"
#include "mrunet/net.hpp"
#include "mrunet/ops.hpp"

using namespace mrunet;

namespace {

Tensor<float> random_tensor(const Shape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    Tensor<float> t(shape);
    for (auto& v : t.values()) v = dist(rng);
    return t;
}

void BM_Conv2dForward(benchmark::State& state) {
    const auto c = static_cast<std::size_t>(state.range(0));
    const auto s = static_cast<std::size_t>(state.range(1));
    const Tensor<float> x = random_tensor({1, c, s, s}, 1), w = random_tensor({c, c, 3, 3}, 2), b({c});
    for (auto _ : state) {
        Tape<float> tape;
        benchmark::DoNotOptimize(conv2d(tape.leaf(x, false), tape.leaf(w, false), tape.leaf(b, false)).value().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(9 * c * c * s * s));
}
BENCHMARK(BM_Conv2dForward)->Args({8, 64})->Args({16, 32})->Args({64, 64})->Unit(benchmark::kMicrosecond);

void BM_Conv2dBackward(benchmark::State& state) {
    const auto c = static_cast<std::size_t>(state.range(0));
    const auto s = static_cast<std::size_t>(state.range(1));
    const Tensor<float> x = random_tensor({1, c, s, s}, 1), w = random_tensor({c, c, 3, 3}, 2), b({c});
    for (auto _ : state) {
        Tape<float> tape;
        auto y = sum(conv2d(tape.leaf(x), tape.leaf(w), tape.leaf(b)));
        tape.backward(y);
    }
}
BENCHMARK(BM_Conv2dBackward)->Args({8, 64})->Args({16, 32})->Unit(benchmark::kMicrosecond);

void model_step(benchmark::State& state, Variant variant, bool backward) {
    const auto size = static_cast<std::size_t>(state.range(0));
    const Model<float> model = build_model<float>({variant, 4, 8, 1, 2}, 0);
    const Tensor<float> x = random_tensor({4, 1, size, size}, 3);
    Tensor<float> labels({4, 1, size, size});
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = x[i] > 0 ? 1.0f : 0.0f;
    for (auto _ : state) {
        Tape<float> tape;
        const auto params = model.bind(tape, backward);
        const auto loss = soft_dice_loss(model.forward(tape.leaf(x, false), params), labels);
        if (backward) tape.backward(loss.loss);
        benchmark::DoNotOptimize(loss.value());
    }
}

void BM_UnetForward(benchmark::State& s) { model_step(s, Variant::Unet, false); }
void BM_MrUnetForward(benchmark::State& s) { model_step(s, Variant::MrUnet, false); }
void BM_UnetTrainStep(benchmark::State& s) { model_step(s, Variant::Unet, true); }
void BM_MrUnetTrainStep(benchmark::State& s) { model_step(s, Variant::MrUnet, true); }
BENCHMARK(BM_UnetForward)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MrUnetForward)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnetTrainStep)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MrUnetTrainStep)->Arg(64)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
