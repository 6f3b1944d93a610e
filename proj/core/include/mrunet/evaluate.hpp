#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>

#include "mrunet/metrics.hpp"
#include "mrunet/raster.hpp"
#include "mrunet/trainer.hpp"

namespace mrunet {

/// Produces a binary prediction for one sample.
using MaskPredictor = std::function<BinaryMask(const ImageSample&)>;

/// Reference mask of a sample as a BinaryMask.
BinaryMask reference_mask(const ImageSample& sample);

/// Scores every sample, in order, against its reference mask.
MetricsReport score_predictions(std::span<const ImageSample> samples, const MaskPredictor& predictor);

/// Foreground probability maps of a batch of equally sized samples.
std::vector<std::vector<float>> foreground_probabilities(const ModelBundle& bundle,
                                                         std::span<const ImageSample> samples);

/// Forward pass, thresholding at `threshold`, pixel metrics per image.
MetricsReport evaluate(const ModelBundle& bundle, std::span<const ImageSample> samples, double threshold = 0.5,
                       std::size_t batch_size = 4);

struct PredictOptions {
    /// Resize the input to side x side before inference.
    std::optional<std::size_t> resize;
    double threshold = 0.5;
    /// Also write the foreground probability map (p * 255, rounded) here.
    std::optional<std::filesystem::path> probability_path;
};

/// Writes an 8-bit PNG mask with values {0,255}. Throws ShapeError when the
/// image size is not divisible by 8 and no resize was requested.
void predict_file(const ModelBundle& bundle, const std::filesystem::path& image_path,
                  const std::filesystem::path& mask_path, const PredictOptions& options = {});

} // namespace mrunet
