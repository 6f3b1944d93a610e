#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrunet/tape.hpp"
#include "mrunet/tensor.hpp"

namespace mrunet {

enum class Variant { Unet, MrUnet };

std::string to_string(Variant variant);
/// Accepts "unet" or "mrunet" (case-insensitive).
Variant parse_variant(std::string_view text);

/// Declarative description of a network. Only the four-level layout is supported.
struct ArchitectureSpec {
    Variant variant = Variant::Unet;
    std::size_t levels = 4;
    std::size_t base_channels = 8;
    std::size_t in_channels = 1;
    std::size_t out_channels = 2;

    /// Throws ValidationError on unsupported values.
    void validate() const;
    /// Feature width of contracting level 1..levels.
    std::size_t width(std::size_t level) const { return base_channels << (level - 1); }

    friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

enum class LayerKind { Conv3x3, Conv1x1, TransposedConv2x2 };

struct LayerSpec {
    std::string name;
    LayerKind kind;
    std::size_t in_channels;
    std::size_t out_channels;

    Shape weight_shape() const;
    Shape bias_shape() const { return {out_channels}; }
};

/// Parameterized layers in forward order.
///
/// enc{1..4}.conv{1,2} form the contracting path, aux{2..4}.conv{1,2} (mrU-Net
/// only) read the cascaded average-pooled input, up{3,2,1} are the transposed
/// convolutions of the expansive path, dec{3,2,1}.conv{1,2} follow each skip
/// concatenation and head is the final 1x1 convolution.
std::vector<LayerSpec> layer_layout(const ArchitectureSpec& spec);

template <typename T>
struct NamedParameter {
    std::string name;
    Tensor<T> value;
};

template <typename T>
class Model {
public:
    Model(ArchitectureSpec spec, std::vector<NamedParameter<T>> parameters);

    const ArchitectureSpec& spec() const noexcept { return spec_; }

    /// Parameters in layout order: for each layer, "<layer>.weight" then "<layer>.bias".
    const std::vector<NamedParameter<T>>& parameters() const noexcept { return parameters_; }
    std::vector<NamedParameter<T>>& parameters() noexcept { return parameters_; }

    const Tensor<T>* find(std::string_view name) const;

    /// Records the forward pass on `tape` using caller-provided parameter
    /// variables aligned with parameters(). Returns the [N,2,H,W] probability map.
    Var<T> forward(const Var<T>& input, const std::vector<Var<T>>& params) const;

    /// Places every parameter on the tape as a gradient-tracked leaf.
    std::vector<Var<T>> bind(Tape<T>& tape, bool requires_grad = true) const;

    /// Forward pass without gradient tracking.
    Tensor<T> predict(const Tensor<T>& batch) const;

    /// Throws ShapeError when the batch cannot be processed by this model.
    void check_input(const Shape& shape) const;

private:
    ArchitectureSpec spec_;
    std::vector<NamedParameter<T>> parameters_;
};

/// He-normal weights (std = sqrt(2 / fan_in)), zero biases; deterministic in (spec, seed).
template <typename T>
Model<T> build_model(const ArchitectureSpec& spec, std::uint64_t seed);

template <typename T>
std::size_t param_count(const Model<T>& model);

template <typename T>
Model<T> convert_model(const Model<float>& model);

} // namespace mrunet
