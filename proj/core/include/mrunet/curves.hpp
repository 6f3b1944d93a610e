#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mrunet/trainer.hpp"

namespace mrunet {

struct LabeledLog {
    std::string label;
    std::vector<RunLogRecord> log;
};

struct PlotFrame {
    double width = 640;
    double height = 400;
    double margin_left = 60;
    double margin_right = 20;
    double margin_top = 20;
    double margin_bottom = 50;
    std::size_t max_epoch = 1;

    /// SVG coordinates of (epoch, sDSC); sDSC spans [0,1] bottom to top.
    std::pair<double, double> map(double epoch, double sdsc) const;
};

/// Frame sized to the longest log.
PlotFrame frame_for(const std::vector<LabeledLog>& logs);

/// One polyline of validation sDSC per log, with labelled axes and a legend.
std::string curves_svg(const std::vector<LabeledLog>& logs);

/// Writes `<label>.csv` (epoch,train_loss,val_sdsc,seconds) per log and curves.svg.
/// Throws ValidationError when no logs or an empty log is given.
void emit_curves(const std::vector<LabeledLog>& logs, const std::filesystem::path& dir);

} // namespace mrunet
