#include "mrunet/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace mrunet {
namespace {

constexpr char kMagic[4] = {'M', 'R', 'U', 'N'};

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    template <typename U>
    void le(U value) {
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
        }
    }
    void f32(float value) { le(std::bit_cast<std::uint32_t>(value)); }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

    const std::uint8_t* take(std::size_t n) {
        if (in_.size() - pos_ < n) {
            throw FormatError("checkpoint truncated at byte " + std::to_string(pos_));
        }
        const std::uint8_t* p = in_.data() + pos_;
        pos_ += n;
        return p;
    }
    template <typename U>
    U le() {
        const std::uint8_t* p = take(sizeof(U));
        U value = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            value |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
        }
        return value;
    }
    float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
    bool done() const { return pos_ == in_.size(); }

private:
    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_checkpoint(const Model<float>& model) {
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.le<std::uint32_t>(kCheckpointVersion);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(model.parameters().size()));
    for (const auto& p : model.parameters()) {
        w.le<std::uint16_t>(static_cast<std::uint16_t>(p.name.size()));
        w.bytes(p.name.data(), p.name.size());
        w.le<std::uint8_t>(static_cast<std::uint8_t>(p.value.rank()));
        for (std::size_t d : p.value.shape()) {
            w.le<std::uint32_t>(static_cast<std::uint32_t>(d));
        }
        for (float v : p.value.values()) {
            w.f32(v);
        }
    }
    return w.take();
}

Model<float> decode_checkpoint(const std::vector<std::uint8_t>& bytes, const ArchitectureSpec& spec) {
    Reader r(bytes);
    if (bytes.size() < sizeof(kMagic) || std::memcmp(r.take(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not a checkpoint: bad magic bytes");
    }
    const auto version = r.le<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto count = r.le<std::uint32_t>();

    std::vector<NamedParameter<float>> stored;
    std::set<std::string> seen;
    for (std::uint32_t t = 0; t < count; ++t) {
        const auto name_len = r.le<std::uint16_t>();
        const auto* name_bytes = r.take(name_len);
        std::string name(reinterpret_cast<const char*>(name_bytes), name_len);
        if (!seen.insert(name).second) {
            throw FormatError("duplicate tensor '" + name + "' in checkpoint");
        }
        const auto rank = r.le<std::uint8_t>();
        Shape shape(rank);
        for (auto& d : shape) {
            d = r.le<std::uint32_t>();
            if (d == 0) {
                throw FormatError("tensor '" + name + "' has a zero dimension");
            }
        }
        std::vector<float> values(shape_size(shape));
        for (auto& v : values) {
            v = r.f32();
        }
        stored.push_back({std::move(name), Tensor<float>(std::move(shape), std::move(values))});
    }
    if (!r.done()) {
        throw FormatError("trailing bytes after the last tensor");
    }

    // Reorder into layout order, reporting the first missing or unexpected name.
    std::vector<NamedParameter<float>> ordered;
    for (const auto& layer : layer_layout(spec)) {
        for (const char* suffix : {".weight", ".bias"}) {
            const std::string name = layer.name + suffix;
            auto it = std::find_if(stored.begin(), stored.end(), [&](const auto& p) { return p.name == name; });
            if (it == stored.end()) {
                throw CompatibilityError("checkpoint lacks parameter '" + name + "' required by the " +
                                         to_string(spec.variant) + " architecture");
            }
            ordered.push_back(std::move(*it));
            stored.erase(it);
        }
    }
    if (!stored.empty()) {
        throw CompatibilityError("checkpoint has parameter '" + stored.front().name + "' not used by the " +
                                 to_string(spec.variant) + " architecture");
    }
    return Model<float>(spec, std::move(ordered));
}

void save_weights(const Model<float>& model, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

Model<float> load_weights(const std::filesystem::path& path, const ArchitectureSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path.string() + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes, spec);
}

} // namespace mrunet
