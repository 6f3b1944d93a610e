#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mrunet/raster.hpp"
#include "mrunet/tensor.hpp"

namespace mrunet {

struct DatasetSplit {
    std::vector<ImageSample> train;
    std::vector<ImageSample> validation;
    std::vector<ImageSample> test;
};

/// Seeded shuffle, then floor(25%) to test, floor(10%) of the remainder (at
/// least one) to validation, the rest to training. Needs at least 4 samples.
DatasetSplit split_dataset(std::vector<ImageSample> samples, std::uint64_t seed);

/// Seeded shuffle followed by fixed-size train/validation/test partitions.
DatasetSplit split_by_counts(std::vector<ImageSample> samples, std::size_t train, std::size_t validation,
                             std::size_t test, std::uint64_t seed);

/// Replaces train and validation by their eight dihedral variants. Test is untouched.
void augment_split(DatasetSplit& split);

/// Reads `images/<id>.{png,pgm,ppm}` paired with `masks/<id>.png`, sorted by id.
/// Masks are validated as strictly binary. When `side` is set, every sample is
/// resized to side x side.
std::vector<ImageSample> load_dataset_dir(const std::filesystem::path& root, std::optional<std::size_t> side = {});

/// Writes `images/<id>.png` and `masks/<id>.png`.
void write_dataset_dir(const std::filesystem::path& root, const std::vector<ImageSample>& samples);

/// Normalised images as [N,C,H,W]; all samples must share one size and channel count.
Tensor<float> image_batch(std::span<const ImageSample> samples, const NormalizationParams& params);

/// Masks as [N,1,H,W] with values 0 and 1.
Tensor<float> label_batch(std::span<const ImageSample> samples);

/// Portable Fisher-Yates permutation of 0..n-1 driven by a 64-bit Mersenne Twister.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

} // namespace mrunet
