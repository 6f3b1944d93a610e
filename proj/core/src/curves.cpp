#include "mrunet/curves.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mrunet {

std::pair<double, double> PlotFrame::map(double epoch, double sdsc) const {
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    const double span = max_epoch > 1 ? static_cast<double>(max_epoch - 1) : 1.0;
    return {margin_left + plot_w * (epoch - 1.0) / span, margin_top + plot_h * (1.0 - sdsc)};
}

PlotFrame frame_for(const std::vector<LabeledLog>& logs) {
    PlotFrame f;
    for (const auto& l : logs) {
        for (const auto& r : l.log) {
            f.max_epoch = std::max(f.max_epoch, r.epoch);
        }
    }
    return f;
}

namespace {

void require_logs(const std::vector<LabeledLog>& logs) {
    if (logs.empty()) {
        throw ValidationError("emit_curves needs at least one run log");
    }
    for (const auto& l : logs) {
        if (l.log.empty()) {
            throw ValidationError("run log '" + l.label + "' is empty");
        }
    }
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string curves_svg(const std::vector<LabeledLog>& logs) {
    require_logs(logs);
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    const PlotFrame f = frame_for(logs);
    std::ostringstream svg;
    svg << std::fixed << std::setprecision(3);
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
        << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const auto [x0, y0] = f.map(1, 0);
    const auto [x1, y1] = f.map(static_cast<double>(f.max_epoch), 1);
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
        << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
        << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        const auto [tx, ty] = f.map(1, v);
        svg << "<text x=\"" << tx - 6 << "\" y=\"" << ty + 4 << "\" text-anchor=\"end\">" << std::setprecision(2)
            << v << std::setprecision(3) << "</text>\n";
    }
    svg << "<text x=\"" << x0 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">1</text>\n"
        << "<text x=\"" << x1 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << f.max_epoch
        << "</text>\n"
        << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << f.height - 10
        << "\" text-anchor=\"middle\" font-size=\"13\">epoch</text>\n"
        << "<text x=\"15\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 15 "
        << (y0 + y1) / 2 << ")\">validation sDSC</text>\n"
        << "</g>\n";

    for (std::size_t i = 0; i < logs.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-label=\""
            << xml_escape(logs[i].label) << "\" points=\"";
        for (std::size_t k = 0; k < logs[i].log.size(); ++k) {
            const auto [px, py] = f.map(static_cast<double>(logs[i].log[k].epoch), logs[i].log[k].val_sdsc);
            char point[48];
            std::snprintf(point, sizeof(point), "%s%.2f,%.2f", k ? " " : "", px, py);
            svg << point;
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << x1 - 100 << "\" y=\"" << y1 + 14 * (i + 1) << "\" fill=\"" << color
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(logs[i].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_curves(const std::vector<LabeledLog>& logs, const std::filesystem::path& dir) {
    require_logs(logs);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create '" + dir.string() + "'");
    }
    for (const auto& l : logs) {
        write_run_log(l.log, dir / (l.label + ".csv"));
    }
    std::ofstream out(dir / "curves.svg", std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + (dir / "curves.svg").string() + "'");
    }
    out << curves_svg(logs);
}

} // namespace mrunet
