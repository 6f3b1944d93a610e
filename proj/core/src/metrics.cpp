#include "mrunet/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mrunet/errors.hpp"

namespace mrunet {

BinaryMask binarize(std::span<const float> probs, std::size_t width, std::size_t height, double threshold) {
    if (probs.size() != width * height) {
        throw ShapeError("binarize: " + std::to_string(probs.size()) + " probabilities for a " +
                         std::to_string(width) + "x" + std::to_string(height) + " mask");
    }
    BinaryMask mask{width, height, std::vector<std::uint8_t>(probs.size())};
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const float p = probs[i];
        if (!(p >= 0.0f && p <= 1.0f)) {
            throw ValidationError("binarize: probability outside [0,1]");
        }
        mask.pixels[i] = static_cast<double>(p) >= threshold ? 1 : 0;
    }
    return mask;
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& ref) {
    if (pred.width != ref.width || pred.height != ref.height || pred.pixels.size() != ref.pixels.size()) {
        throw ShapeError("segmentation_metrics: prediction and reference differ in size");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.pixels.size(); ++i) {
        const bool p = pred.pixels[i] != 0;
        const bool r = ref.pixels[i] != 0;
        if (p && r) {
            ++c.tp;
        } else if (p) {
            ++c.fp;
        } else if (r) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

namespace {

// ratio * 100, or the agreement convention when the denominator is empty.
double percent(std::uint64_t num, std::uint64_t den, bool agrees) {
    if (den == 0) {
        return agrees ? 100.0 : 0.0;
    }
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

SegmentationScores scores_from_counts(const ConfusionCounts& c) {
    SegmentationScores s;
    s.counts = c;
    const bool no_ref_fg = c.tp + c.fn == 0;
    const bool no_pred_fg = c.tp + c.fp == 0;
    const bool no_ref_bg = c.tn + c.fp == 0;
    const bool no_pred_bg = c.tn + c.fn == 0;
    if (no_ref_fg) {
        s.dsc = no_pred_fg ? 100.0 : 0.0;
        s.sensitivity = no_pred_fg ? 100.0 : 0.0;
    } else {
        s.dsc = percent(2 * c.tp, 2 * c.tp + c.fp + c.fn, false);
        s.sensitivity = percent(c.tp, c.tp + c.fn, false);
    }
    s.specificity = percent(c.tn, c.tn + c.fp, no_ref_bg && no_pred_bg);
    return s;
}

SegmentationScores segmentation_metrics(const BinaryMask& pred, const BinaryMask& ref) {
    return scores_from_counts(confusion(pred, ref));
}

MeanSd mean_sd(std::span<const double> values) {
    MeanSd out;
    if (values.empty()) {
        return out;
    }
    for (double v : values) {
        out.mean += v;
    }
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

std::vector<double> MetricsReport::column(double SegmentationScores::*metric) const {
    std::vector<double> out;
    out.reserve(images.size());
    for (const auto& img : images) {
        out.push_back(img.scores.*metric);
    }
    return out;
}

MetricsReport make_report(std::vector<ImageScores> images) {
    MetricsReport r;
    r.images = std::move(images);
    r.dsc = mean_sd(r.column(&SegmentationScores::dsc));
    r.sensitivity = mean_sd(r.column(&SegmentationScores::sensitivity));
    r.specificity = mean_sd(r.column(&SegmentationScores::specificity));
    return r;
}

std::string report_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "id,dsc,sensitivity,specificity\n";
    for (const auto& img : report.images) {
        out << img.id << ',' << img.scores.dsc << ',' << img.scores.sensitivity << ',' << img.scores.specificity
            << '\n';
    }
    out << "aggregate,dsc_mean,dsc_sd,sensitivity_mean,sensitivity_sd,specificity_mean,specificity_sd\n";
    out << "aggregate," << report.dsc.mean << ',' << report.dsc.sd << ',' << report.sensitivity.mean << ','
        << report.sensitivity.sd << ',' << report.specificity.mean << ',' << report.specificity.sd << '\n';
    return out.str();
}

void write_report_csv(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << report_csv(report);
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::vector<ImageScores> read_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "id,dsc,sensitivity,specificity") {
        throw FormatError(path.string() + ": not a metrics report");
    }
    std::vector<ImageScores> rows;
    while (std::getline(in, line)) {
        if (line.rfind("aggregate,", 0) == 0) {
            break;
        }
        std::istringstream fields(line);
        ImageScores row;
        std::string dsc, sens, spec;
        if (!std::getline(fields, row.id, ',') || !std::getline(fields, dsc, ',') ||
            !std::getline(fields, sens, ',') || !std::getline(fields, spec)) {
            throw FormatError(path.string() + ": malformed row '" + line + "'");
        }
        try {
            row.scores.dsc = std::stod(dsc);
            row.scores.sensitivity = std::stod(sens);
            row.scores.specificity = std::stod(spec);
        } catch (const std::exception&) {
            throw FormatError(path.string() + ": malformed number in '" + line + "'");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace mrunet
