#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrunet/config.hpp"
#include "mrunet/metrics.hpp"
#include "mrunet/trainer.hpp"
#include "mrunet/ttest.hpp"

namespace mrunet {

/// One metric on one split: both models' mean/sd and the paired test of
/// "mrU-Net improves on U-Net".
struct MetricComparison {
    std::string split;
    std::string metric;
    MeanSd unet;
    MeanSd mrunet;
    /// Empty when the paired differences were all zero.
    std::optional<TTestResult> test;
    bool significant = false;
    std::string note;
};

struct ModelRun {
    std::vector<RunLogRecord> log;
    MetricsReport validation;
    MetricsReport test;
    std::optional<std::size_t> epochs_to_threshold;
};

struct CompareReport {
    ModelRun unet;
    ModelRun mrunet;
    std::vector<MetricComparison> rows;
    double tau = 0.8;
};

struct CompareInputs {
    TrainConfig unet;
    TrainConfig mrunet;
    /// Skip training and evaluate these checkpoints instead.
    std::optional<std::filesystem::path> unet_checkpoint;
    std::optional<std::filesystem::path> mrunet_checkpoint;
    /// Run logs accompanying provided checkpoints (for epochs-to-threshold).
    std::optional<std::filesystem::path> unet_log;
    std::optional<std::filesystem::path> mrunet_log;
};

/// Paired comparison of metric lists from the same images, b against a.
MetricComparison compare_metric(const std::string& split, const std::string& metric, std::span<const double> unet,
                                std::span<const double> mrunet);

/// Builds the comparison rows (validation/test x DSC/sensitivity/specificity).
std::vector<MetricComparison> compare_reports(const ModelRun& unet, const ModelRun& mrunet);

/// Trains (or loads) both models on identical splits, evaluates them and runs
/// the paired tests. Throws ValidationError when the configs do not share data.
CompareReport compare(const CompareInputs& inputs);

/// Markdown table in the validation/test x DSC/sensitivity/specificity layout;
/// significant mrU-Net entries are bold.
std::string format_compare_table(const CompareReport& report);

/// Writes compare.md, compare.json, per-image CSVs and the validation curves.
void write_compare_outputs(const CompareReport& report, const std::filesystem::path& dir);

/// Training-rate summary over several training seeds.
struct TrainingRateReport {
    double tau = 0.8;
    std::vector<std::uint64_t> seeds;
    std::vector<std::optional<std::size_t>> unet_epochs;
    std::vector<std::optional<std::size_t>> mrunet_epochs;
    /// Median with unreached runs ranked last; empty when the median run never reached tau.
    std::optional<double> unet_median;
    std::optional<double> mrunet_median;
};

/// Median of epochs-to-threshold values, unreached runs ranked above every reached one.
std::optional<double> median_epochs(std::vector<std::optional<std::size_t>> values);

TrainingRateReport summarize_training_rate(const std::vector<std::uint64_t>& seeds,
                                           const std::vector<CompareReport>& reports);

std::string format_training_rate(const TrainingRateReport& report);

} // namespace mrunet
