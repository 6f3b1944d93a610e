#include "mrunet/dataset.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>

#include "mrunet/image_io.hpp"

namespace mrunet {

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

namespace {

std::vector<ImageSample> shuffled(std::vector<ImageSample> samples, std::uint64_t seed) {
    const auto order = seeded_permutation(samples.size(), seed);
    std::vector<ImageSample> out;
    out.reserve(samples.size());
    for (std::size_t i : order) {
        out.push_back(std::move(samples[i]));
    }
    return out;
}

DatasetSplit take_counts(std::vector<ImageSample> samples, std::size_t train, std::size_t validation) {
    DatasetSplit split;
    auto it = std::make_move_iterator(samples.begin());
    split.train.assign(it, it + static_cast<std::ptrdiff_t>(train));
    split.validation.assign(it + static_cast<std::ptrdiff_t>(train),
                            it + static_cast<std::ptrdiff_t>(train + validation));
    split.test.assign(it + static_cast<std::ptrdiff_t>(train + validation), std::make_move_iterator(samples.end()));
    return split;
}

} // namespace

DatasetSplit split_dataset(std::vector<ImageSample> samples, std::uint64_t seed) {
    if (samples.size() < 4) {
        throw ValidationError("split_dataset needs at least 4 samples, got " + std::to_string(samples.size()));
    }
    const std::size_t test = samples.size() / 4;
    const std::size_t rest = samples.size() - test;
    const std::size_t validation = std::max<std::size_t>(1, rest / 10);
    const std::size_t train = rest - validation;
    return take_counts(shuffled(std::move(samples), seed), train, validation);
}

DatasetSplit split_by_counts(std::vector<ImageSample> samples, std::size_t train, std::size_t validation,
                             std::size_t test, std::uint64_t seed) {
    if (train + validation + test != samples.size()) {
        throw ValidationError("split counts " + std::to_string(train) + "+" + std::to_string(validation) + "+" +
                              std::to_string(test) + " do not cover " + std::to_string(samples.size()) +
                              " samples");
    }
    return take_counts(shuffled(std::move(samples), seed), train, validation);
}

void augment_split(DatasetSplit& split) {
    for (auto* part : {&split.train, &split.validation}) {
        std::vector<ImageSample> grown;
        grown.reserve(part->size() * 8);
        for (const auto& s : *part) {
            for (auto& v : dihedral_augment(s)) {
                grown.push_back(std::move(v));
            }
        }
        *part = std::move(grown);
    }
}

std::vector<ImageSample> load_dataset_dir(const std::filesystem::path& root, std::optional<std::size_t> side) {
    namespace fs = std::filesystem;
    const fs::path images = root / "images";
    const fs::path masks = root / "masks";
    if (!fs::is_directory(images) || !fs::is_directory(masks)) {
        throw IoError("dataset '" + root.string() + "' needs images/ and masks/ subdirectories");
    }
    std::map<std::string, fs::path> found;
    for (const auto& entry : fs::directory_iterator(images)) {
        const std::string ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm") {
            const std::string id = entry.path().stem().string();
            if (!found.emplace(id, entry.path()).second) {
                throw ValidationError("dataset has two images with id '" + id + "'");
            }
        }
    }
    if (found.empty()) {
        throw ValidationError("dataset '" + root.string() + "' contains no images");
    }
    std::vector<ImageSample> samples;
    for (const auto& [id, image_path] : found) {
        const fs::path mask_path = masks / (id + ".png");
        if (!fs::exists(mask_path)) {
            throw ValidationError("image '" + id + "' has no mask " + mask_path.string());
        }
        ImageSample sample{load_raster(image_path), load_raster(mask_path), id};
        if (sample.mask.channels != 1) {
            throw ValidationError("mask '" + id + "' must be grayscale");
        }
        sample.validate();
        if (side) {
            sample = resize_sample(sample, *side, *side);
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

void write_dataset_dir(const std::filesystem::path& root, const std::vector<ImageSample>& samples) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(root / "images", ec);
    fs::create_directories(root / "masks", ec);
    if (ec) {
        throw IoError("cannot create dataset directories under '" + root.string() + "': " + ec.message());
    }
    for (const auto& s : samples) {
        s.validate();
        save_png(s.image, root / "images" / (s.id + ".png"));
        save_png(s.mask, root / "masks" / (s.id + ".png"));
    }
}

Tensor<float> image_batch(std::span<const ImageSample> samples, const NormalizationParams& params) {
    if (samples.empty()) {
        throw ValidationError("image_batch: empty batch");
    }
    const Raster& first = samples.front().image;
    Tensor<float> out({samples.size(), first.channels, first.height, first.width});
    const std::size_t stride = first.channels * first.height * first.width;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Raster& img = samples[i].image;
        if (img.width != first.width || img.height != first.height || img.channels != first.channels) {
            throw ShapeError("image_batch: sample '" + samples[i].id + "' differs in size or channels");
        }
        const auto values = normalize(img, params);
        std::copy(values.begin(), values.end(), out.data() + i * stride);
    }
    return out;
}

Tensor<float> label_batch(std::span<const ImageSample> samples) {
    if (samples.empty()) {
        throw ValidationError("label_batch: empty batch");
    }
    const Raster& first = samples.front().mask;
    Tensor<float> out({samples.size(), 1, first.height, first.width});
    const std::size_t stride = first.height * first.width;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Raster& m = samples[i].mask;
        if (m.width != first.width || m.height != first.height || m.channels != 1) {
            throw ShapeError("label_batch: mask '" + samples[i].id + "' differs in size");
        }
        for (std::size_t p = 0; p < stride; ++p) {
            out[i * stride + p] = m.samples[p] != 0 ? 1.0f : 0.0f;
        }
    }
    return out;
}

} // namespace mrunet
