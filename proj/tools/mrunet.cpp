#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrunet/compare.hpp"
#include "mrunet/config.hpp"
#include "mrunet/curves.hpp"
#include "mrunet/dataset.hpp"
#include "mrunet/diagnostics.hpp"
#include "mrunet/errors.hpp"
#include "mrunet/evaluate.hpp"
#include "mrunet/synthetic.hpp"
#include "mrunet/trainer.hpp"

namespace fs = std::filesystem;
using namespace mrunet;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kDivergence = 3 };

// Flags shared by the commands that resolve a TrainConfig.
struct ConfigFlags {
    std::optional<std::string> config_path;
    bool desk = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> data_seed;
    std::optional<std::string> out;
    std::optional<std::string> arch;
    std::optional<std::size_t> base_channels;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> patience;
    std::optional<std::size_t> image_size;
    std::optional<std::string> dataset;
    bool no_augment = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON document with TrainConfig fields");
        cmd->add_flag("--desk", desk, "Desk-scale defaults (base 8, size 64, 300 epochs, batch 4)");
        cmd->add_option("--seed", seed, "Initialisation and shuffling seed");
        cmd->add_option("--data-seed", data_seed, "Seed for synthetic data and the split");
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--arch", arch, "unet or mrunet");
        cmd->add_option("--base-channels", base_channels, "Width of the first level");
        cmd->add_option("--epochs", epochs, "Maximum number of epochs");
        cmd->add_option("--batch", batch, "Mini-batch size");
        cmd->add_option("--patience", patience, "Early stop after this many epochs without improvement");
        cmd->add_option("--image-size", image_size, "Side length for directory datasets");
        cmd->add_option("--dataset", dataset, "Dataset directory with images/ and masks/");
        cmd->add_flag("--no-augment", no_augment, "Disable dihedral augmentation");
    }

    // Defaults (or desk defaults), then the JSON document, then flags.
    TrainConfig resolve() const {
        TrainConfig config = desk ? TrainConfig::desk() : TrainConfig{};
        if (config_path) {
            config = load_config(*config_path, config);
        }
        if (seed) config.seed = *seed;
        if (data_seed) config.data_seed = *data_seed;
        if (out) config.output_dir = *out;
        if (arch) config.arch.variant = parse_variant(*arch);
        if (base_channels) config.arch.base_channels = *base_channels;
        if (epochs) config.max_epochs = *epochs;
        if (batch) config.batch_size = *batch;
        if (patience) config.patience = *patience;
        if (image_size) config.image_size = *image_size;
        if (dataset) config.dataset = fs::path(*dataset);
        if (no_augment) config.augment = false;
        config.validate();
        return config;
    }
};

std::string fixed(double value, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << value;
    return out.str();
}

void print_report(const MetricsReport& report) {
    std::cout << "images       " << report.images.size() << "\n"
              << "dsc          " << fixed(report.dsc.mean, 2) << " +- " << fixed(report.dsc.sd, 2) << "\n"
              << "sensitivity  " << fixed(report.sensitivity.mean, 2) << " +- " << fixed(report.sensitivity.sd, 2)
              << "\n"
              << "specificity  " << fixed(report.specificity.mean, 2) << " +- " << fixed(report.specificity.sd, 2)
              << "\n";
}

int run_train(const ConfigFlags& flags, bool quiet) {
    const TrainConfig config = flags.resolve();
    const PreparedData data = prepare_data(config);
    std::cout << to_string(config.arch.variant) << ": " << data.split.train.size() << " train / "
              << data.split.validation.size() << " validation / " << data.split.test.size() << " test\n";
    const auto observer = [quiet](const RunLogRecord& r) {
        if (!quiet) {
            std::cout << "epoch " << r.epoch << "  loss " << fixed(r.train_loss, 5) << "  val_sdsc "
                      << fixed(r.val_sdsc, 5) << "  " << fixed(r.seconds, 2) << "s\n"
                      << std::flush;
        }
        return true;
    };
    const TrainResult result = train(config, data, observer);
    std::cout << "best epoch " << result.best_epoch << " val_sdsc " << fixed(result.best_val_sdsc, 6) << "\n";
    if (const auto reached = epochs_to_threshold(result.log, config.tau)) {
        std::cout << "reached tau=" << config.tau << " at epoch " << *reached << "\n";
    } else {
        std::cout << "did not reach tau=" << config.tau << "\n";
    }
    std::cout << "checkpoint " << (config.output_dir / "best.mrun").string() << "\n";
    return kOk;
}

int run_eval(const ConfigFlags& flags, const std::string& checkpoint, const std::string& split, double threshold) {
    const TrainConfig config = flags.resolve();
    // An explicitly requested architecture must match the checkpoint.
    const bool explicit_arch = flags.arch || flags.base_channels;
    const ModelBundle bundle =
        load_bundle(checkpoint, explicit_arch ? std::optional<ArchitectureSpec>(config.arch) : std::nullopt);
    const PreparedData data = prepare_data(config);
    const std::vector<ImageSample>* samples = nullptr;
    if (split == "test") {
        samples = &data.split.test;
    } else if (split == "validation") {
        samples = &data.split.validation;
    } else if (split == "train") {
        samples = &data.split.train;
    } else {
        throw ValidationError("unknown split '" + split + "' (expected train, validation or test)");
    }
    const MetricsReport report = evaluate(bundle, *samples, threshold);
    print_report(report);
    if (flags.out) {
        fs::create_directories(*flags.out);
        const fs::path path = fs::path(*flags.out) / ("metrics_" + split + ".csv");
        write_report_csv(report, path);
        std::cout << "wrote " << path.string() << "\n";
    }
    return kOk;
}

int run_predict(const std::string& checkpoint, const std::string& image, const std::string& out,
                const PredictOptions& options) {
    const ModelBundle bundle = load_bundle(checkpoint);
    predict_file(bundle, image, out, options);
    std::cout << "wrote " << out << "\n";
    return kOk;
}

struct CompareFlags {
    std::size_t seeds = 1;
    std::optional<double> tau;
    std::optional<std::string> unet_checkpoint;
    std::optional<std::string> mrunet_checkpoint;
    std::optional<std::string> unet_log;
    std::optional<std::string> mrunet_log;
};

CompareInputs compare_inputs(TrainConfig base, const CompareFlags& cf, const fs::path& dir) {
    if (cf.tau) {
        base.tau = *cf.tau;
    }
    CompareInputs inputs{base, base, {}, {}, {}, {}};
    inputs.unet.arch.variant = Variant::Unet;
    inputs.mrunet.arch.variant = Variant::MrUnet;
    inputs.unet.output_dir = dir / "unet";
    inputs.mrunet.output_dir = dir / "mrunet";
    if (cf.unet_checkpoint) inputs.unet_checkpoint = fs::path(*cf.unet_checkpoint);
    if (cf.mrunet_checkpoint) inputs.mrunet_checkpoint = fs::path(*cf.mrunet_checkpoint);
    if (cf.unet_log) inputs.unet_log = fs::path(*cf.unet_log);
    if (cf.mrunet_log) inputs.mrunet_log = fs::path(*cf.mrunet_log);
    return inputs;
}

int run_compare(const ConfigFlags& flags, const CompareFlags& cf) {
    const TrainConfig base = flags.resolve();
    if (cf.seeds == 0) {
        throw ValidationError("--seeds must be at least 1");
    }
    const fs::path root = base.output_dir;
    if (cf.seeds == 1) {
        const CompareReport report = compare(compare_inputs(base, cf, root));
        write_compare_outputs(report, root);
        std::cout << format_compare_table(report);
        return kOk;
    }
    if (cf.unet_checkpoint || cf.mrunet_checkpoint) {
        throw ValidationError("--seeds cannot be combined with provided checkpoints");
    }
    std::vector<std::uint64_t> seeds;
    std::vector<CompareReport> reports;
    for (std::size_t i = 0; i < cf.seeds; ++i) {
        TrainConfig config = base;
        config.seed = base.seed + i;
        const fs::path dir = root / ("seed_" + std::to_string(config.seed));
        std::cout << "seed " << config.seed << "\n" << std::flush;
        reports.push_back(compare(compare_inputs(config, cf, dir)));
        write_compare_outputs(reports.back(), dir);
        seeds.push_back(config.seed);
    }
    const TrainingRateReport rate = summarize_training_rate(seeds, reports);
    const std::string text = format_training_rate(rate);
    fs::create_directories(root);
    std::ofstream(root / "training_rate.md") << text;
    std::cout << text;
    return kOk;
}

int run_synth(std::size_t count, std::size_t size, std::uint64_t seed, bool single_scale, const std::string& out) {
    if (count == 0) {
        throw ValidationError("--count must be positive");
    }
    write_dataset_dir(out, gen_synthetic(count, size, seed, !single_scale));
    std::cout << "wrote " << count << " samples to " << out << "\n";
    return kOk;
}

int run_gradcheck(const std::string& arch, std::size_t base, std::size_t size, std::uint64_t seed, std::size_t seeds,
                  double step, double tolerance) {
    ArchitectureSpec spec;
    spec.variant = parse_variant(arch);
    spec.base_channels = base;
    double worst = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        const GradCheckReport r = model_loss_grad_check(spec, size, seed + i, step);
        std::cout << "seed " << seed + i << "  max_rel_error " << std::scientific << std::setprecision(3)
                  << r.max_relative_error << "  worst analytic " << r.analytic << " numeric " << r.numeric
                  << std::defaultfloat << " (input " << r.worst_input << ", " << r.elements_checked << " elements, "
                  << r.reduced_steps << " reduced steps, " << r.kinked_elements << " kinked)\n";
        worst = std::max(worst, r.max_relative_error);
    }
    const bool ok = worst <= tolerance;
    std::cout << (ok ? "ok" : "FAILED") << ": worst " << std::scientific << worst << " vs tolerance " << tolerance
              << "\n";
    return ok ? kOk : kValidation;
}

int run_curves(const std::vector<std::string>& logs, const std::string& out) {
    std::vector<LabeledLog> labeled;
    for (const std::string& entry : logs) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ValidationError("--log expects label=path, got '" + entry + "'");
        }
        labeled.push_back({entry.substr(0, eq), read_run_log(entry.substr(eq + 1))});
    }
    emit_curves(labeled, out);
    std::cout << "wrote " << (fs::path(out) / "curves.svg").string() << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"U-Net and multi-resolution U-Net segmentation"};
    app.require_subcommand(1);

    ConfigFlags train_flags;
    bool quiet = false;
    auto* train_cmd = app.add_subcommand("train", "Train a network and keep the best validation checkpoint");
    train_flags.attach(train_cmd);
    train_cmd->add_flag("--quiet", quiet, "Only print the summary");

    ConfigFlags eval_flags;
    std::string eval_checkpoint;
    std::string eval_split = "test";
    double eval_threshold = 0.5;
    auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset split");
    eval_flags.attach(eval_cmd);
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--split", eval_split, "train, validation or test");
    eval_cmd->add_option("--threshold", eval_threshold, "Binarisation threshold");

    std::string predict_checkpoint;
    std::string predict_image;
    std::string predict_out;
    std::optional<std::string> predict_prob;
    PredictOptions predict_options;
    auto* predict_cmd = app.add_subcommand("predict", "Segment one image");
    predict_cmd->add_option("--checkpoint", predict_checkpoint, "Checkpoint file")->required();
    predict_cmd->add_option("--image", predict_image, "Input PNG or PNM image")->required();
    predict_cmd->add_option("--out", predict_out, "Output mask PNG")->required();
    predict_cmd->add_option("--prob", predict_prob, "Also write the foreground probability PNG");
    predict_cmd->add_option("--resize", predict_options.resize, "Resize to side x side first");
    predict_cmd->add_option("--threshold", predict_options.threshold, "Binarisation threshold");

    ConfigFlags compare_flags;
    CompareFlags cf;
    auto* compare_cmd = app.add_subcommand("compare", "Train or load both variants and compare them");
    compare_flags.attach(compare_cmd);
    compare_cmd->add_option("--seeds", cf.seeds, "Number of training seeds for the training-rate report");
    compare_cmd->add_option("--threshold", cf.tau, "Validation sDSC level for epochs-to-threshold");
    compare_cmd->add_option("--unet-checkpoint", cf.unet_checkpoint, "Evaluate this U-Net instead of training");
    compare_cmd->add_option("--mrunet-checkpoint", cf.mrunet_checkpoint, "Evaluate this mrU-Net instead of training");
    compare_cmd->add_option("--unet-log", cf.unet_log, "Run log of the provided U-Net");
    compare_cmd->add_option("--mrunet-log", cf.mrunet_log, "Run log of the provided mrU-Net");

    std::size_t synth_count = 28;
    std::size_t synth_size = 64;
    std::uint64_t synth_seed = 0;
    bool synth_single = false;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic ellipse dataset");
    synth_cmd->add_option("--count", synth_count, "Number of samples");
    synth_cmd->add_option("--size", synth_size, "Image side length");
    synth_cmd->add_option("--seed", synth_seed, "Generator seed");
    synth_cmd->add_flag("--single-scale", synth_single, "Medium ellipses only");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    std::string gc_arch = "mrunet";
    std::size_t gc_base = 2;
    std::size_t gc_size = 8;
    std::uint64_t gc_seed = 0;
    std::size_t gc_seeds = 1;
    double gc_step = 5e-4;
    double gc_tol = 1e-4;
    auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of the full network loss");
    gc_cmd->add_option("--arch", gc_arch, "unet or mrunet");
    gc_cmd->add_option("--base-channels", gc_base, "Width of the first level");
    gc_cmd->add_option("--size", gc_size, "Input side length");
    gc_cmd->add_option("--seed", gc_seed, "First seed");
    gc_cmd->add_option("--seeds", gc_seeds, "Number of seeds");
    gc_cmd->add_option("--step", gc_step, "Central-difference step");
    gc_cmd->add_option("--threshold", gc_tol, "Maximum accepted relative error");

    std::vector<std::string> curve_logs;
    std::string curves_out;
    auto* curves_cmd = app.add_subcommand("curves", "Plot validation sDSC curves from run logs");
    curves_cmd->add_option("--log", curve_logs, "label=runlog.csv (repeatable)")->required();
    curves_cmd->add_option("--out", curves_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*train_cmd) return run_train(train_flags, quiet);
        if (*eval_cmd) return run_eval(eval_flags, eval_checkpoint, eval_split, eval_threshold);
        if (*predict_cmd) {
            if (predict_prob) predict_options.probability_path = fs::path(*predict_prob);
            return run_predict(predict_checkpoint, predict_image, predict_out, predict_options);
        }
        if (*compare_cmd) return run_compare(compare_flags, cf);
        if (*synth_cmd) return run_synth(synth_count, synth_size, synth_seed, synth_single, synth_out);
        if (*gc_cmd) return run_gradcheck(gc_arch, gc_base, gc_size, gc_seed, gc_seeds, gc_step, gc_tol);
        if (*curves_cmd) return run_curves(curve_logs, curves_out);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDivergence;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kOk;
}
