#include "mrunet/compare.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mrunet/curves.hpp"
#include "mrunet/evaluate.hpp"

namespace mrunet {

MetricComparison compare_metric(const std::string& split, const std::string& metric, std::span<const double> unet,
                                std::span<const double> mrunet) {
    MetricComparison row{split, metric, mean_sd(unet), mean_sd(mrunet), std::nullopt, false, ""};
    try {
        row.test = paired_t_one_tailed(unet, mrunet);
        row.significant = row.test->significant;
    } catch (const DegenerateVarianceError&) {
        // Every pair differs by the same amount; identical results are the usual cause.
        row.note = row.unet.mean == row.mrunet.mean ? "no difference" : "constant difference";
    }
    return row;
}

std::vector<MetricComparison> compare_reports(const ModelRun& unet, const ModelRun& mrunet) {
    std::vector<MetricComparison> rows;
    const std::pair<const char*, double SegmentationScores::*> metrics[] = {
        {"DSC", &SegmentationScores::dsc},
        {"Sensitivity", &SegmentationScores::sensitivity},
        {"Specificity", &SegmentationScores::specificity},
    };
    const std::pair<const char*, const MetricsReport ModelRun::*> splits[] = {
        {"validation", &ModelRun::validation},
        {"test", &ModelRun::test},
    };
    for (const auto& [split, member] : splits) {
        const MetricsReport& a = unet.*member;
        const MetricsReport& b = mrunet.*member;
        if (a.images.size() != b.images.size()) {
            throw ValidationError("compare: models were evaluated on different " + std::string(split) + " sets");
        }
        for (std::size_t i = 0; i < a.images.size(); ++i) {
            if (a.images[i].id != b.images[i].id) {
                throw ValidationError("compare: " + std::string(split) + " images are not paired ('" +
                                      a.images[i].id + "' vs '" + b.images[i].id + "')");
            }
        }
        for (const auto& [name, field] : metrics) {
            const auto xa = a.column(field);
            const auto xb = b.column(field);
            rows.push_back(compare_metric(split, name, xa, xb));
        }
    }
    return rows;
}

namespace {

ModelRun run_model(const TrainConfig& config, const PreparedData& data,
                   const std::optional<std::filesystem::path>& checkpoint,
                   const std::optional<std::filesystem::path>& log) {
    ModelRun run;
    std::optional<ModelBundle> bundle;
    if (checkpoint) {
        bundle = load_bundle(*checkpoint, config.arch);
        if (log) {
            run.log = read_run_log(*log);
        }
    } else {
        TrainResult trained = train(config, data);
        run.log = std::move(trained.log);
        bundle = ModelBundle{std::move(trained.best_model), trained.norm};
    }
    run.validation = evaluate(*bundle, data.split.validation, 0.5, config.batch_size);
    if (!data.split.test.empty()) {
        run.test = evaluate(*bundle, data.split.test, 0.5, config.batch_size);
    }
    run.epochs_to_threshold = epochs_to_threshold(run.log, config.tau);
    return run;
}

std::string fmt(const char* pattern, double a, double b) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

} // namespace

CompareReport compare(const CompareInputs& inputs) {
    inputs.unet.validate();
    inputs.mrunet.validate();
    if (!inputs.unet.same_data(inputs.mrunet)) {
        throw ValidationError("compare: both models must use the same dataset, splits and data seed");
    }
    const PreparedData data = prepare_data(inputs.unet);
    CompareReport report;
    report.tau = inputs.unet.tau;
    report.unet = run_model(inputs.unet, data, inputs.unet_checkpoint, inputs.unet_log);
    report.mrunet = run_model(inputs.mrunet, data, inputs.mrunet_checkpoint, inputs.mrunet_log);
    report.rows = compare_reports(report.unet, report.mrunet);
    return report;
}

std::string format_compare_table(const CompareReport& report) {
    std::ostringstream out;
    out << "| Network | Validation DSC | Validation Sensitivity | Validation Specificity | Test DSC | Test "
           "Sensitivity | Test Specificity |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const bool mr : {false, true}) {
        out << "| " << (mr ? "mrU-Net" : "U-Net") << " |";
        for (const auto& row : report.rows) {
            const MeanSd& v = mr ? row.mrunet : row.unet;
            const std::string cell = fmt("%.1f ± %.1f%%", v.mean, v.sd);
            out << ' ' << (mr && row.significant ? "**" + cell + "**" : cell) << " |";
        }
        out << '\n';
    }
    out << "\nOne-tailed paired t-test, H0: mrU-Net does not improve on U-Net (alpha = 0.05).\n\n";
    out << "| Split | Metric | t | df | p (one-tailed) | significant |\n|---|---|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        out << "| " << row.split << " | " << row.metric << " | ";
        if (row.test) {
            out << fmt("%.4f", row.test->t, 0) << " | " << row.test->df << " | "
                << fmt("%.6f", row.test->p_one_tailed, 0) << " | " << (row.significant ? "yes" : "no") << " |\n";
        } else {
            out << "- | - | - | " << row.note << " |\n";
        }
    }
    out << "\nEpochs to validation sDSC >= " << fmt("%.2f", report.tau, 0) << ": U-Net ";
    out << (report.unet.epochs_to_threshold ? std::to_string(*report.unet.epochs_to_threshold) : "not reached");
    out << ", mrU-Net ";
    out << (report.mrunet.epochs_to_threshold ? std::to_string(*report.mrunet.epochs_to_threshold) : "not reached");
    out << '\n';
    return out.str();
}

void write_compare_outputs(const CompareReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create '" + dir.string() + "'");
    }
    write_report_csv(report.unet.validation, dir / "unet_validation.csv");
    write_report_csv(report.mrunet.validation, dir / "mrunet_validation.csv");
    if (!report.unet.test.images.empty()) {
        write_report_csv(report.unet.test, dir / "unet_test.csv");
        write_report_csv(report.mrunet.test, dir / "mrunet_test.csv");
    }
    {
        std::ofstream md(dir / "compare.md", std::ios::trunc);
        md << format_compare_table(report);
    }
    nlohmann::json j;
    j["tau"] = report.tau;
    auto epochs = [](const std::optional<std::size_t>& e) { return e ? nlohmann::json(*e) : nlohmann::json(nullptr); };
    j["unet_epochs_to_threshold"] = epochs(report.unet.epochs_to_threshold);
    j["mrunet_epochs_to_threshold"] = epochs(report.mrunet.epochs_to_threshold);
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["split"] = row.split;
        r["metric"] = row.metric;
        r["unet_mean"] = row.unet.mean;
        r["unet_sd"] = row.unet.sd;
        r["mrunet_mean"] = row.mrunet.mean;
        r["mrunet_sd"] = row.mrunet.sd;
        if (row.test) {
            r["t"] = row.test->t;
            r["df"] = row.test->df;
            r["p_one_tailed"] = row.test->p_one_tailed;
        } else {
            r["t"] = nullptr;
            r["df"] = nullptr;
            r["p_one_tailed"] = nullptr;
        }
        r["significant"] = row.significant;
        r["note"] = row.note;
        j["rows"].push_back(r);
    }
    std::ofstream(dir / "compare.json", std::ios::trunc) << j.dump(2) << '\n';

    std::vector<LabeledLog> logs;
    if (!report.unet.log.empty()) {
        logs.push_back({"unet", report.unet.log});
    }
    if (!report.mrunet.log.empty()) {
        logs.push_back({"mrunet", report.mrunet.log});
    }
    if (!logs.empty()) {
        emit_curves(logs, dir / "curves");
    }
}

std::optional<double> median_epochs(std::vector<std::optional<std::size_t>> values) {
    if (values.empty()) {
        return std::nullopt;
    }
    constexpr double kUnreached = std::numeric_limits<double>::infinity();
    std::vector<double> v;
    for (const auto& e : values) {
        v.push_back(e ? static_cast<double>(*e) : kUnreached);
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double m = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    if (std::isinf(m)) {
        return std::nullopt;
    }
    return m;
}

TrainingRateReport summarize_training_rate(const std::vector<std::uint64_t>& seeds,
                                           const std::vector<CompareReport>& reports) {
    TrainingRateReport r;
    r.seeds = seeds;
    if (!reports.empty()) {
        r.tau = reports.front().tau;
    }
    for (const auto& rep : reports) {
        r.unet_epochs.push_back(rep.unet.epochs_to_threshold);
        r.mrunet_epochs.push_back(rep.mrunet.epochs_to_threshold);
    }
    r.unet_median = median_epochs(r.unet_epochs);
    r.mrunet_median = median_epochs(r.mrunet_epochs);
    return r;
}

std::string format_training_rate(const TrainingRateReport& report) {
    std::ostringstream out;
    auto cell = [](const std::optional<std::size_t>& e) { return e ? std::to_string(*e) : std::string("not reached"); };
    auto median = [](const std::optional<double>& m) { return m ? fmt("%.1f", *m, 0) : std::string("not reached"); };
    out << "Epochs to validation sDSC >= " << fmt("%.2f", report.tau, 0) << "\n\n";
    out << "| seed | U-Net | mrU-Net |\n|---|---|---|\n";
    for (std::size_t i = 0; i < report.seeds.size(); ++i) {
        out << "| " << report.seeds[i] << " | " << cell(report.unet_epochs[i]) << " | "
            << cell(report.mrunet_epochs[i]) << " |\n";
    }
    out << "| median | " << median(report.unet_median) << " | " << median(report.mrunet_median) << " |\n";
    return out.str();
}

} // namespace mrunet
