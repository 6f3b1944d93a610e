#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mrunet {

/// Binary mask, one byte per pixel holding 0 or 1.
struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Foreground where p >= threshold. Throws ValidationError for p outside [0,1].
BinaryMask binarize(std::span<const float> probs, std::size_t width, std::size_t height, double threshold = 0.5);

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Metrics in percent.
struct SegmentationScores {
    ConfusionCounts counts;
    double dsc = 0;
    double sensitivity = 0;
    double specificity = 0;
};

/// DSC = 2tp / (2tp + fp + fn), sensitivity = tp / (tp + fn),
/// specificity = tn / (tn + fp), all times 100. When the reference class behind
/// a denominator is empty the score is 100 if the prediction agrees (no
/// foreground resp. no background predicted) and 0 otherwise.
SegmentationScores segmentation_metrics(const BinaryMask& pred, const BinaryMask& ref);

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& ref);
SegmentationScores scores_from_counts(const ConfusionCounts& counts);

struct MeanSd {
    double mean = 0;
    /// Sample standard deviation (n - 1); zero for a single value.
    double sd = 0;
};

MeanSd mean_sd(std::span<const double> values);

struct ImageScores {
    std::string id;
    SegmentationScores scores;
};

struct MetricsReport {
    std::vector<ImageScores> images;
    MeanSd dsc;
    MeanSd sensitivity;
    MeanSd specificity;

    std::vector<double> column(double SegmentationScores::*metric) const;
};

/// Aggregates per-image scores in the given order.
MetricsReport make_report(std::vector<ImageScores> images);

/// CSV with header `id,dsc,sensitivity,specificity`, one row per image, then an
/// `aggregate` footer preceded by `dsc_mean,dsc_sd,...` column names.
std::string report_csv(const MetricsReport& report);
void write_report_csv(const MetricsReport& report, const std::filesystem::path& path);

/// Parses the per-image rows of a report CSV (footer ignored).
std::vector<ImageScores> read_report_csv(const std::filesystem::path& path);

} // namespace mrunet
