#include "mrunet/net.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <unordered_map>

#include "mrunet/ops.hpp"

namespace mrunet {

std::string to_string(Variant variant) {
    return variant == Variant::Unet ? "unet" : "mrunet";
}

Variant parse_variant(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "unet" || lower == "u-net") {
        return Variant::Unet;
    }
    if (lower == "mrunet" || lower == "mru-net" || lower == "mr-unet") {
        return Variant::MrUnet;
    }
    throw ValidationError("unknown architecture '" + std::string(text) + "' (expected unet or mrunet)");
}

void ArchitectureSpec::validate() const {
    if (levels != 4) {
        throw ValidationError("only four-level networks are supported, got " + std::to_string(levels));
    }
    if (base_channels < 1) {
        throw ValidationError("base_channels must be at least 1");
    }
    if (in_channels != 1 && in_channels != 3) {
        throw ValidationError("in_channels must be 1 or 3, got " + std::to_string(in_channels));
    }
    if (out_channels != 2) {
        throw ValidationError("out_channels is fixed at 2, got " + std::to_string(out_channels));
    }
}

Shape LayerSpec::weight_shape() const {
    switch (kind) {
    case LayerKind::Conv3x3:
        return {out_channels, in_channels, 3, 3};
    case LayerKind::Conv1x1:
        return {out_channels, in_channels, 1, 1};
    case LayerKind::TransposedConv2x2:
        return {in_channels, out_channels, 2, 2};
    }
    return {};
}

std::vector<LayerSpec> layer_layout(const ArchitectureSpec& spec) {
    spec.validate();
    const bool multires = spec.variant == Variant::MrUnet;
    std::vector<LayerSpec> layers;
    auto conv_pair = [&layers](const std::string& prefix, std::size_t in, std::size_t out) {
        layers.push_back({prefix + ".conv1", LayerKind::Conv3x3, in, out});
        layers.push_back({prefix + ".conv2", LayerKind::Conv3x3, out, out});
    };

    conv_pair("enc1", spec.in_channels, spec.width(1));
    for (std::size_t level = 2; level <= spec.levels; ++level) {
        std::size_t in = spec.width(level - 1);
        if (multires) {
            const std::string aux = "aux" + std::to_string(level);
            conv_pair(aux, spec.in_channels, spec.width(level));
            in += spec.width(level);
        }
        conv_pair("enc" + std::to_string(level), in, spec.width(level));
    }
    for (std::size_t level = spec.levels - 1; level >= 1; --level) {
        const std::string tag = std::to_string(level);
        layers.push_back({"up" + tag, LayerKind::TransposedConv2x2, spec.width(level + 1), spec.width(level)});
        conv_pair("dec" + tag, 2 * spec.width(level), spec.width(level));
    }
    layers.push_back({"head", LayerKind::Conv1x1, spec.width(1), spec.out_channels});
    return layers;
}

template <typename T>
Model<T>::Model(ArchitectureSpec spec, std::vector<NamedParameter<T>> parameters)
    : spec_(spec), parameters_(std::move(parameters)) {
    const auto layers = layer_layout(spec_);
    if (parameters_.size() != 2 * layers.size()) {
        throw CompatibilityError("model needs " + std::to_string(2 * layers.size()) + " parameters, got " +
                                 std::to_string(parameters_.size()));
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const NamedParameter<T>& w = parameters_[2 * i];
        const NamedParameter<T>& b = parameters_[2 * i + 1];
        if (w.name != layers[i].name + ".weight" || b.name != layers[i].name + ".bias") {
            throw CompatibilityError("unexpected parameter '" + w.name + "'/'" + b.name + "' for layer " +
                                     layers[i].name);
        }
        if (w.value.shape() != layers[i].weight_shape() || b.value.shape() != layers[i].bias_shape()) {
            throw CompatibilityError("shape mismatch for layer " + layers[i].name + ": weight " +
                                     shape_string(w.value.shape()) + ", expected " +
                                     shape_string(layers[i].weight_shape()));
        }
    }
}

template <typename T>
const Tensor<T>* Model<T>::find(std::string_view name) const {
    for (const auto& p : parameters_) {
        if (p.name == name) {
            return &p.value;
        }
    }
    return nullptr;
}

template <typename T>
void Model<T>::check_input(const Shape& shape) const {
    if (shape.size() != 4) {
        throw ShapeError("model input must be [N,C,H,W], got " + shape_string(shape));
    }
    if (shape[1] != spec_.in_channels) {
        throw ShapeError("model expects " + std::to_string(spec_.in_channels) + " input channels, got " +
                         std::to_string(shape[1]));
    }
    const std::size_t factor = std::size_t{1} << (spec_.levels - 1);
    if (shape[2] % factor != 0 || shape[3] % factor != 0) {
        throw ShapeError("input height and width must be divisible by " + std::to_string(factor) + ", got " +
                         shape_string(shape));
    }
}

template <typename T>
std::vector<Var<T>> Model<T>::bind(Tape<T>& tape, bool requires_grad) const {
    std::vector<Var<T>> vars;
    vars.reserve(parameters_.size());
    for (const auto& p : parameters_) {
        vars.push_back(tape.leaf(p.value, requires_grad));
    }
    return vars;
}

template <typename T>
Var<T> Model<T>::forward(const Var<T>& input, const std::vector<Var<T>>& params) const {
    check_input(input.shape());
    if (params.size() != parameters_.size()) {
        throw ShapeError("forward: expected " + std::to_string(parameters_.size()) + " parameter variables, got " +
                         std::to_string(params.size()));
    }
    std::size_t next = 0;
    auto conv = [&](const Var<T>& x) {
        const Var<T>& w = params[next++];
        const Var<T>& b = params[next++];
        return relu(conv2d(x, w, b));
    };
    auto conv_pair = [&](const Var<T>& x) { return conv(conv(x)); };

    const bool multires = spec_.variant == Variant::MrUnet;
    std::vector<Var<T>> skips;
    skips.push_back(conv_pair(input));
    Var<T> scaled = input;
    for (std::size_t level = 2; level <= spec_.levels; ++level) {
        Var<T> x = max_pool2x2(skips.back());
        if (multires) {
            scaled = avg_pool2x2(scaled);
            x = concat_channels(x, conv_pair(scaled));
        }
        skips.push_back(conv_pair(x));
    }

    Var<T> x = skips.back();
    for (std::size_t level = spec_.levels - 1; level >= 1; --level) {
        const Var<T>& w = params[next++];
        const Var<T>& b = params[next++];
        x = conv_pair(concat_channels(skips[level - 1], transposed_conv2x2(x, w, b)));
    }
    const Var<T>& w = params[next++];
    const Var<T>& b = params[next++];
    return softmax_channels(conv2d(x, w, b));
}

template <typename T>
Tensor<T> Model<T>::predict(const Tensor<T>& batch) const {
    Tape<T> tape;
    const Var<T> input = tape.leaf(batch, false);
    const Var<T> out = forward(input, bind(tape, false));
    return out.value();
}

template <typename T>
Model<T> build_model(const ArchitectureSpec& spec, std::uint64_t seed) {
    const auto layers = layer_layout(spec);
    std::mt19937_64 rng(seed);
    std::vector<NamedParameter<T>> params;
    params.reserve(2 * layers.size());
    for (const auto& layer : layers) {
        const Shape ws = layer.weight_shape();
        const std::size_t fan_in = layer.kind == LayerKind::TransposedConv2x2 ? layer.in_channels
                                                                              : ws[1] * ws[2] * ws[3];
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
        Tensor<T> w(ws);
        for (T& v : w.values()) {
            v = static_cast<T>(normal(rng));
        }
        params.push_back({layer.name + ".weight", std::move(w)});
        params.push_back({layer.name + ".bias", Tensor<T>(layer.bias_shape())});
    }
    return Model<T>(spec, std::move(params));
}

template <typename T>
std::size_t param_count(const Model<T>& model) {
    std::size_t total = 0;
    for (const auto& p : model.parameters()) {
        total += p.value.size();
    }
    return total;
}

template <typename T>
Model<T> convert_model(const Model<float>& model) {
    std::vector<NamedParameter<T>> params;
    for (const auto& p : model.parameters()) {
        params.push_back({p.name, p.value.template cast<T>()});
    }
    return Model<T>(model.spec(), std::move(params));
}

template class Model<float>;
template class Model<double>;
template Model<float> build_model<float>(const ArchitectureSpec&, std::uint64_t);
template Model<double> build_model<double>(const ArchitectureSpec&, std::uint64_t);
template std::size_t param_count<float>(const Model<float>&);
template std::size_t param_count<double>(const Model<double>&);
template Model<float> convert_model<float>(const Model<float>&);
template Model<double> convert_model<double>(const Model<float>&);

} // namespace mrunet
