#include "mrunet/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mrunet {

using nlohmann::json;

void TrainConfig::validate() const {
    arch.validate();
    if (batch_size < 1) {
        throw ValidationError("batch_size must be at least 1");
    }
    if (max_epochs < 1) {
        throw ValidationError("max_epochs must be at least 1");
    }
    if (!(lr > 0.0)) {
        throw ValidationError("lr must be positive");
    }
    if (!(rho > 0.0 && rho < 1.0) || !(eps > 0.0)) {
        throw ValidationError("rho must lie in (0,1) and eps must be positive");
    }
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw ValidationError("tau must lie in (0,1]");
    }
    if (image_size && (*image_size < 8 || *image_size % 8 != 0)) {
        throw ValidationError("image_size must be a positive multiple of 8");
    }
    if (!dataset) {
        if (synthetic.size < 8 || synthetic.size % 8 != 0) {
            throw ValidationError("synthetic.size must be a positive multiple of 8");
        }
        if (synthetic.train < 1 || synthetic.validation < 1) {
            throw ValidationError("synthetic train and validation splits must be nonempty");
        }
        if (synthetic.count() < 4) {
            throw ValidationError("synthetic dataset needs at least 4 images");
        }
    }
}

TrainConfig TrainConfig::desk() {
    TrainConfig c;
    c.arch.base_channels = 8;
    c.max_epochs = 300;
    c.batch_size = 4;
    c.image_size = 64;
    c.augment = false;
    c.norm_roi = NormRoi::WholeImage;
    c.synthetic = SyntheticSpec{};
    return c;
}

bool TrainConfig::same_data(const TrainConfig& other) const {
    if (dataset != other.dataset || data_seed != other.data_seed || augment != other.augment ||
        norm_roi != other.norm_roi) {
        return false;
    }
    if (dataset) {
        return image_size == other.image_size;
    }
    return synthetic == other.synthetic;
}

std::string to_string(NormRoi roi) {
    return roi == NormRoi::WholeImage ? "whole_image" : "foreground_mask";
}

NormRoi parse_norm_roi(const std::string& text) {
    if (text == "whole_image") {
        return NormRoi::WholeImage;
    }
    if (text == "foreground_mask") {
        return NormRoi::ForegroundMask;
    }
    throw ValidationError("norm_roi must be whole_image or foreground_mask, got '" + text + "'");
}

std::string to_json(const TrainConfig& c) {
    json j;
    j["arch"] = to_string(c.arch.variant);
    j["base_channels"] = c.arch.base_channels;
    j["in_channels"] = c.arch.in_channels;
    j["dataset"] = c.dataset ? json(c.dataset->string()) : json(nullptr);
    j["image_size"] = c.image_size ? json(*c.image_size) : json(nullptr);
    j["synthetic"] = {{"train", c.synthetic.train},
                      {"validation", c.synthetic.validation},
                      {"test", c.synthetic.test},
                      {"size", c.synthetic.size},
                      {"multi_scale", c.synthetic.multi_scale}};
    j["augment"] = c.augment;
    j["norm_roi"] = to_string(c.norm_roi);
    j["batch_size"] = c.batch_size;
    j["max_epochs"] = c.max_epochs;
    j["lr"] = c.lr;
    j["rho"] = c.rho;
    j["eps"] = c.eps;
    j["patience"] = c.patience ? json(*c.patience) : json(nullptr);
    j["tau"] = c.tau;
    j["seed"] = c.seed;
    j["data_seed"] = c.data_seed;
    j["output_dir"] = c.output_dir.string();
    return j.dump(2);
}

TrainConfig config_from_json(const std::string& text, const TrainConfig& base) {
    TrainConfig c = base;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) {
            throw ValidationError("config must be a JSON object");
        }
        for (const auto& [key, value] : j.items()) {
            if (key == "arch") {
                c.arch.variant = parse_variant(value.get<std::string>());
            } else if (key == "base_channels") {
                c.arch.base_channels = value.get<std::size_t>();
            } else if (key == "in_channels") {
                c.arch.in_channels = value.get<std::size_t>();
            } else if (key == "dataset") {
                c.dataset = value.is_null() ? std::nullopt
                                            : std::optional<std::filesystem::path>(value.get<std::string>());
            } else if (key == "image_size") {
                c.image_size = value.is_null() ? std::nullopt : std::optional<std::size_t>(value.get<std::size_t>());
            } else if (key == "synthetic") {
                c.synthetic.train = value.value("train", c.synthetic.train);
                c.synthetic.validation = value.value("validation", c.synthetic.validation);
                c.synthetic.test = value.value("test", c.synthetic.test);
                c.synthetic.size = value.value("size", c.synthetic.size);
                c.synthetic.multi_scale = value.value("multi_scale", c.synthetic.multi_scale);
            } else if (key == "augment") {
                c.augment = value.get<bool>();
            } else if (key == "norm_roi") {
                c.norm_roi = parse_norm_roi(value.get<std::string>());
            } else if (key == "batch_size") {
                c.batch_size = value.get<std::size_t>();
            } else if (key == "max_epochs") {
                c.max_epochs = value.get<std::size_t>();
            } else if (key == "lr") {
                c.lr = value.get<double>();
            } else if (key == "rho") {
                c.rho = value.get<double>();
            } else if (key == "eps") {
                c.eps = value.get<double>();
            } else if (key == "patience") {
                c.patience = value.is_null() ? std::nullopt : std::optional<std::size_t>(value.get<std::size_t>());
            } else if (key == "tau") {
                c.tau = value.get<double>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "data_seed") {
                c.data_seed = value.get<std::uint64_t>();
            } else if (key == "output_dir") {
                c.output_dir = value.get<std::string>();
            } else {
                throw ValidationError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

TrainConfig load_config(const std::filesystem::path& path, const TrainConfig& base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return config_from_json(text.str(), base);
}

} // namespace mrunet
