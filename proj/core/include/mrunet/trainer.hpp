#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "mrunet/config.hpp"
#include "mrunet/dataset.hpp"
#include "mrunet/net.hpp"

namespace mrunet {

/// Splits, augmentation and normalisation resolved from a TrainConfig.
struct PreparedData {
    DatasetSplit split;
    /// Computed from the training split only.
    NormalizationParams norm;
};

/// Loads or generates the dataset, splits it, augments train/validation when
/// requested and derives normalisation from the training images.
PreparedData prepare_data(const TrainConfig& config);

struct RunLogRecord {
    std::size_t epoch = 0;
    double train_loss = 0;
    double val_sdsc = 0;
    double seconds = 0;
};

struct TrainResult {
    std::vector<RunLogRecord> log;
    std::size_t best_epoch = 0;
    double best_val_sdsc = -1;
    Model<float> best_model;
    NormalizationParams norm;
};

/// Called after every epoch; return false to stop early.
using EpochObserver = std::function<bool(const RunLogRecord&)>;

/// Trains with soft-Dice loss and Adadelta, keeping the epoch with the highest
/// validation soft Dice. When config.output_dir is nonempty the best checkpoint
/// (best.mrun + best.mrun.json) is rewritten at every improvement and the run
/// log is written to runlog.csv.
///
/// Throws ValidationError for empty splits and DivergenceError on a non-finite loss.
TrainResult train(const TrainConfig& config, const PreparedData& data, const EpochObserver& observer = {});
TrainResult train(const TrainConfig& config);

/// Mean per-image soft Dice of the model on `samples`, computed in batches.
double validation_sdsc(const Model<float>& model, std::span<const ImageSample> samples,
                       const NormalizationParams& norm, std::size_t batch_size);

/// First epoch whose validation sDSC reaches tau.
std::optional<std::size_t> epochs_to_threshold(const std::vector<RunLogRecord>& log, double tau);

void write_run_log(const std::vector<RunLogRecord>& log, const std::filesystem::path& path);
std::vector<RunLogRecord> read_run_log(const std::filesystem::path& path);

/// A checkpoint with the metadata needed to run it on new images.
struct ModelBundle {
    Model<float> model;
    NormalizationParams norm;
};

/// Writes `path` (weights) and `path` + ".json" (architecture and normalisation).
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
/// Reads a bundle; when `expected` is given the stored architecture must match it.
ModelBundle load_bundle(const std::filesystem::path& path, const std::optional<ArchitectureSpec>& expected = {});

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

} // namespace mrunet
