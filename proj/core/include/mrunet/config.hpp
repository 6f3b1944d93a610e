#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "mrunet/net.hpp"
#include "mrunet/raster.hpp"

namespace mrunet {

/// Seeded synthetic dataset with explicit split sizes.
struct SyntheticSpec {
    std::size_t train = 16;
    std::size_t validation = 4;
    std::size_t test = 8;
    std::size_t size = 64;
    bool multi_scale = true;

    std::size_t count() const { return train + validation + test; }
    friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct TrainConfig {
    ArchitectureSpec arch{Variant::Unet, 4, 64, 1, 2};
    /// Directory dataset (images/, masks/). When empty the synthetic spec is used.
    std::optional<std::filesystem::path> dataset;
    /// Side length every directory image is resized to; unset keeps native sizes.
    std::optional<std::size_t> image_size = 512;
    SyntheticSpec synthetic;
    /// Dihedral augmentation of the train and validation splits.
    bool augment = true;
    NormRoi norm_roi = NormRoi::ForegroundMask;

    std::size_t batch_size = 16;
    std::size_t max_epochs = 5000;
    double lr = 1.0;
    double rho = 0.95;
    double eps = 1e-6;
    /// Stop after this many epochs without a new best validation sDSC.
    std::optional<std::size_t> patience;
    /// Validation sDSC level used for epochs-to-threshold reporting.
    double tau = 0.8;

    /// Drives weight initialisation and batch shuffling.
    std::uint64_t seed = 0;
    /// Drives synthetic generation and the train/validation/test split.
    std::uint64_t data_seed = 0;
    std::filesystem::path output_dir = "run";

    void validate() const;

    /// Desk-scale defaults: base 8, synthetic 64x64 multi-scale data, 300 epochs, batch 4,
    /// no augmentation, whole-image min-max normalisation.
    static TrainConfig desk();

    /// True when both configs resolve to the same images and splits.
    bool same_data(const TrainConfig& other) const;
};

std::string to_json(const TrainConfig& config);
/// Parses a JSON document whose keys mirror TrainConfig; missing keys keep `base` values.
TrainConfig config_from_json(const std::string& text, const TrainConfig& base = {});
TrainConfig load_config(const std::filesystem::path& path, const TrainConfig& base = {});

std::string to_string(NormRoi roi);
NormRoi parse_norm_roi(const std::string& text);

} // namespace mrunet
