#include "mrunet/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "mrunet/dataset.hpp"
#include "mrunet/image_io.hpp"

namespace mrunet {

BinaryMask reference_mask(const ImageSample& sample) {
    BinaryMask m{sample.mask.width, sample.mask.height, std::vector<std::uint8_t>(sample.mask.samples.size())};
    for (std::size_t i = 0; i < m.pixels.size(); ++i) {
        m.pixels[i] = sample.mask.samples[i] != 0 ? 1 : 0;
    }
    return m;
}

MetricsReport score_predictions(std::span<const ImageSample> samples, const MaskPredictor& predictor) {
    std::vector<ImageScores> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        rows.push_back({s.id, segmentation_metrics(predictor(s), reference_mask(s))});
    }
    return make_report(std::move(rows));
}

std::vector<std::vector<float>> foreground_probabilities(const ModelBundle& bundle,
                                                         std::span<const ImageSample> samples) {
    const Tensor<float> probs = bundle.model.predict(image_batch(samples, bundle.norm));
    const std::size_t hw = probs.dim(2) * probs.dim(3);
    std::vector<std::vector<float>> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const float* fg = probs.data() + (2 * i + 1) * hw;
        out.emplace_back(fg, fg + hw);
    }
    return out;
}

MetricsReport evaluate(const ModelBundle& bundle, std::span<const ImageSample> samples, double threshold,
                       std::size_t batch_size) {
    if (samples.empty()) {
        throw ValidationError("evaluate: no samples");
    }
    batch_size = std::max<std::size_t>(1, batch_size);
    std::vector<ImageScores> rows;
    for (std::size_t start = 0; start < samples.size(); start += batch_size) {
        const auto chunk = samples.subspan(start, std::min(batch_size, samples.size() - start));
        const auto maps = foreground_probabilities(bundle, chunk);
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            const BinaryMask pred = binarize(maps[i], chunk[i].mask.width, chunk[i].mask.height, threshold);
            rows.push_back({chunk[i].id, segmentation_metrics(pred, reference_mask(chunk[i]))});
        }
    }
    return make_report(std::move(rows));
}

void predict_file(const ModelBundle& bundle, const std::filesystem::path& image_path,
                  const std::filesystem::path& mask_path, const PredictOptions& options) {
    Raster image = load_raster(image_path);
    if (options.resize) {
        image = resize_bicubic(image, *options.resize, *options.resize);
    }
    if (image.width % 8 != 0 || image.height % 8 != 0) {
        throw ShapeError("image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                         " is not divisible by 8; pass a resize size");
    }
    const ImageSample sample{image, Raster(image.width, image.height, 1), image_path.stem().string()};
    const auto maps = foreground_probabilities(bundle, std::span<const ImageSample>(&sample, 1));
    const BinaryMask mask = binarize(maps[0], image.width, image.height, options.threshold);

    Raster out(image.width, image.height, 1);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
        out.samples[i] = mask.pixels[i] ? 255 : 0;
    }
    save_png(out, mask_path);
    if (options.probability_path) {
        Raster prob(image.width, image.height, 1);
        for (std::size_t i = 0; i < maps[0].size(); ++i) {
            prob.samples[i] = static_cast<std::uint8_t>(std::floor(255.0 * maps[0][i] + 0.5));
        }
        save_png(prob, *options.probability_path);
    }
}

} // namespace mrunet
