#include "mrunet/trainer.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mrunet/adadelta.hpp"
#include "mrunet/checkpoint.hpp"
#include "mrunet/loss.hpp"
#include "mrunet/synthetic.hpp"

namespace mrunet {

PreparedData prepare_data(const TrainConfig& config) {
    config.validate();
    PreparedData data;
    if (config.dataset) {
        data.split = split_dataset(load_dataset_dir(*config.dataset, config.image_size), config.data_seed);
    } else {
        const SyntheticSpec& s = config.synthetic;
        data.split = split_by_counts(gen_synthetic(s.count(), s.size, config.data_seed, s.multi_scale), s.train,
                                     s.validation, s.test, config.data_seed);
    }
    if (data.split.train.empty() || data.split.validation.empty()) {
        throw ValidationError("training needs nonempty train and validation splits");
    }
    for (const auto* part : {&data.split.train, &data.split.validation, &data.split.test}) {
        for (const auto& s : *part) {
            if (s.image.channels != config.arch.in_channels) {
                throw ValidationError("image '" + s.id + "' has " + std::to_string(s.image.channels) +
                                      " channels but the network expects " +
                                      std::to_string(config.arch.in_channels));
            }
        }
    }
    if (config.augment) {
        augment_split(data.split);
    }
    if (config.arch.in_channels == 3) {
        data.norm = NormalizationParams{0.0, 255.0, NormMode::Rgb255};
    } else {
        data.norm = compute_norm_params(data.split.train, config.norm_roi);
    }
    return data;
}

double validation_sdsc(const Model<float>& model, std::span<const ImageSample> samples,
                       const NormalizationParams& norm, std::size_t batch_size) {
    if (samples.empty()) {
        throw ValidationError("validation split is empty");
    }
    double total = 0;
    for (std::size_t start = 0; start < samples.size(); start += batch_size) {
        const auto chunk = samples.subspan(start, std::min(batch_size, samples.size() - start));
        const Tensor<float> probs = model.predict(image_batch(chunk, norm));
        for (float s : soft_dice_scores(probs, label_batch(chunk))) {
            total += s;
        }
    }
    return total / static_cast<double>(samples.size());
}

namespace {

// Stacks pre-normalised per-sample buffers into one batch tensor.
Tensor<float> gather(const std::vector<std::vector<float>>& rows, const std::vector<std::size_t>& order,
                     std::size_t begin, std::size_t end, Shape sample_shape) {
    sample_shape.insert(sample_shape.begin(), end - begin);
    Tensor<float> out(sample_shape);
    const std::size_t stride = rows[order[begin]].size();
    for (std::size_t i = begin; i < end; ++i) {
        std::copy(rows[order[i]].begin(), rows[order[i]].end(), out.data() + (i - begin) * stride);
    }
    return out;
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch) {
    // splitmix64 finaliser over (seed, epoch)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (epoch + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

TrainResult train(const TrainConfig& config, const PreparedData& data, const EpochObserver& observer) {
    config.validate();
    const auto& train_set = data.split.train;
    const auto& val_set = data.split.validation;
    if (train_set.empty() || val_set.empty()) {
        throw ValidationError("training needs nonempty train and validation splits");
    }

    std::vector<std::vector<float>> images, labels;
    for (const auto& s : train_set) {
        images.push_back(normalize(s.image, data.norm));
        const Tensor<float> l = label_batch(std::span<const ImageSample>(&s, 1));
        labels.emplace_back(l.values().begin(), l.values().end());
    }
    const Raster& first = train_set.front().image;
    const Shape image_shape{first.channels, first.height, first.width};
    const Shape label_shape{1, first.height, first.width};

    Model<float> model = build_model<float>(config.arch, config.seed);
    model.check_input({1, first.channels, first.height, first.width});
    Adadelta<float> optimizer({config.rho, config.eps, config.lr});

    const bool persist = !config.output_dir.empty();
    if (persist) {
        std::error_code ec;
        std::filesystem::create_directories(config.output_dir, ec);
        if (ec) {
            throw IoError("cannot create output directory '" + config.output_dir.string() + "'");
        }
        std::ofstream(config.output_dir / "config.json") << to_json(config) << '\n';
    }

    TrainResult result{{}, 0, -1.0, model, data.norm};
    const auto start = std::chrono::steady_clock::now();
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto order = seeded_permutation(train_set.size(), epoch_seed(config.seed, epoch));
        double loss_sum = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            Tape<float> tape;
            const Var<float> input = tape.leaf(gather(images, order, begin, end, image_shape), false);
            const auto params = model.bind(tape);
            const Var<float> probs = model.forward(input, params);
            const auto loss = soft_dice_loss(probs, gather(labels, order, begin, end, label_shape));
            const double value = loss.value();
            if (!std::isfinite(value)) {
                throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch));
            }
            tape.backward(loss.loss);

            std::vector<Tensor<float>> grads;
            std::vector<Tensor<float>*> targets;
            std::vector<const Tensor<float>*> grad_ptrs;
            grads.reserve(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                grads.push_back(tape.grad_tensor(params[i]));
                targets.push_back(&model.parameters()[i].value);
            }
            for (const auto& g : grads) {
                grad_ptrs.push_back(&g);
            }
            optimizer.step(targets, grad_ptrs);
            loss_sum += value * static_cast<double>(end - begin);
        }

        RunLogRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(order.size());
        record.val_sdsc = validation_sdsc(model, val_set, data.norm, config.batch_size);
        if (!std::isfinite(record.val_sdsc)) {
            throw DivergenceError("non-finite validation score at epoch " + std::to_string(epoch));
        }
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.log.push_back(record);

        if (record.val_sdsc > result.best_val_sdsc) {
            result.best_val_sdsc = record.val_sdsc;
            result.best_epoch = epoch;
            result.best_model = model;
            since_best = 0;
            if (persist) {
                save_bundle({model, data.norm}, config.output_dir / "best.mrun");
            }
        } else {
            ++since_best;
        }
        if (persist) {
            write_run_log(result.log, config.output_dir / "runlog.csv");
        }
        if (observer && !observer(record)) {
            break;
        }
        if (config.patience && since_best >= *config.patience) {
            break;
        }
    }
    return result;
}

TrainResult train(const TrainConfig& config) {
    return train(config, prepare_data(config));
}

std::optional<std::size_t> epochs_to_threshold(const std::vector<RunLogRecord>& log, double tau) {
    for (const auto& r : log) {
        if (r.val_sdsc >= tau) {
            return r.epoch;
        }
    }
    return std::nullopt;
}

void write_run_log(const std::vector<RunLogRecord>& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << "epoch,train_loss,val_sdsc,seconds\n" << std::setprecision(17);
    for (const auto& r : log) {
        out << r.epoch << ',' << r.train_loss << ',' << r.val_sdsc << ',' << std::setprecision(6) << r.seconds
            << std::setprecision(17) << '\n';
    }
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::vector<RunLogRecord> read_run_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open run log '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "epoch,train_loss,val_sdsc,seconds") {
        throw FormatError(path.string() + ": not a run log");
    }
    std::vector<RunLogRecord> log;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string a, b, c, d;
        if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, c, ',') ||
            !std::getline(fields, d)) {
            throw FormatError(path.string() + ": malformed row '" + line + "'");
        }
        try {
            log.push_back({std::stoul(a), std::stod(b), std::stod(c), std::stod(d)});
        } catch (const std::exception&) {
            throw FormatError(path.string() + ": malformed number in '" + line + "'");
        }
    }
    return log;
}

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
    return std::filesystem::path(checkpoint.string() + ".json");
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
    save_weights(bundle.model, path);
    nlohmann::json j;
    const ArchitectureSpec& a = bundle.model.spec();
    j["arch"] = to_string(a.variant);
    j["levels"] = a.levels;
    j["base_channels"] = a.base_channels;
    j["in_channels"] = a.in_channels;
    j["out_channels"] = a.out_channels;
    j["norm"] = {{"mode", bundle.norm.mode == NormMode::MinMax ? "minmax" : "rgb255"},
                 {"i_min", bundle.norm.i_min},
                 {"i_max", bundle.norm.i_max}};
    std::ofstream out(sidecar_path(path), std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + sidecar_path(path).string() + "'");
    }
    out << j.dump(2) << '\n';
}

ModelBundle load_bundle(const std::filesystem::path& path, const std::optional<ArchitectureSpec>& expected) {
    std::ifstream in(sidecar_path(path));
    if (!in) {
        throw IoError("missing checkpoint metadata '" + sidecar_path(path).string() + "'");
    }
    ArchitectureSpec spec;
    NormalizationParams norm;
    try {
        const auto j = nlohmann::json::parse(in);
        spec.variant = parse_variant(j.at("arch").get<std::string>());
        spec.levels = j.at("levels").get<std::size_t>();
        spec.base_channels = j.at("base_channels").get<std::size_t>();
        spec.in_channels = j.at("in_channels").get<std::size_t>();
        spec.out_channels = j.at("out_channels").get<std::size_t>();
        const auto& n = j.at("norm");
        norm.mode = n.at("mode").get<std::string>() == "minmax" ? NormMode::MinMax : NormMode::Rgb255;
        norm.i_min = n.at("i_min").get<double>();
        norm.i_max = n.at("i_max").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad checkpoint metadata '" + sidecar_path(path).string() + "': " + e.what());
    }
    if (expected && !(*expected == spec)) {
        throw CompatibilityError("checkpoint '" + path.string() + "' holds a " + to_string(spec.variant) +
                                 " model with base " + std::to_string(spec.base_channels) +
                                 ", which does not match the requested architecture");
    }
    return {load_weights(path, expected.value_or(spec)), norm};
}

} // namespace mrunet
