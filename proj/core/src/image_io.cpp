#include "mrunet/image_io.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace mrunet {

std::uint8_t rescale_to_8bit(std::uint32_t value, std::uint32_t maxval) {
    if (maxval == 255) {
        return static_cast<std::uint8_t>(value);
    }
    const std::uint64_t num = 2ull * value * 255ull + maxval;
    return static_cast<std::uint8_t>(num / (2ull * maxval));
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- PNM ----

class PnmParser {
public:
    PnmParser(const std::vector<std::uint8_t>& bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

    std::uint32_t header_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            fail("malformed header");
        }
        std::uint64_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_++] - '0');
            if (v > 0xFFFFFFFFull) {
                fail("header value out of range");
            }
        }
        return static_cast<std::uint32_t>(v);
    }

    void single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            fail("missing whitespace after header");
        }
        ++pos_;
    }

    std::uint32_t binary_sample(bool wide) {
        const std::size_t n = wide ? 2 : 1;
        if (bytes_.size() - pos_ < n) {
            fail("truncated pixel data");
        }
        std::uint32_t v = bytes_[pos_];
        if (wide) {
            v = (v << 8) | bytes_[pos_ + 1];
        }
        pos_ += n;
        return v;
    }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(name_ + ": " + what); }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::string name_;
    std::size_t pos_ = 2;
};

Raster decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    const char kind = static_cast<char>(bytes[1]);
    const bool ascii = kind == '2' || kind == '3';
    const std::size_t channels = (kind == '3' || kind == '6') ? 3 : 1;
    PnmParser parser(bytes, name);
    const std::uint32_t width = parser.header_int();
    const std::uint32_t height = parser.header_int();
    const std::uint32_t maxval = parser.header_int();
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        parser.fail("invalid dimensions or maxval");
    }
    if (!ascii) {
        parser.single_space();
    }
    Raster out(width, height, channels);
    for (auto& s : out.samples) {
        const std::uint32_t v = ascii ? parser.header_int() : parser.binary_sample(maxval > 255);
        if (v > maxval) {
            parser.fail("sample exceeds maxval");
        }
        s = rescale_to_8bit(v, maxval);
    }
    return out;
}

// ---- PNG ----

struct PngReadState {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t n) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->bytes->size() - state->pos < n) {
        png_error(png, "unexpected end of file");
    }
    std::copy_n(state->bytes->data() + state->pos, n, out);
    state->pos += n;
}

void png_quiet_warning(png_structp, png_const_charp) {}

// Decodes into `out` and returns nullptr, or returns libpng's error message.
// Kept free of non-trivial locals so that longjmp cannot skip destructors.
const char* decode_png_raw(const std::vector<std::uint8_t>* bytes, std::uint32_t* width, std::uint32_t* height,
                           int* channels, int* depth, std::vector<std::uint8_t>* pixels) {
    static thread_local char message[256];
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet_warning);
    if (!png) {
        return "cannot allocate decoder";
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return "cannot allocate decoder";
    }
    PngReadState state{bytes, 0};
    png_bytep* rows = nullptr;
    if (setjmp(png_jmpbuf(png))) {
        std::snprintf(message, sizeof(message), "corrupt PNG data");
        png_free(png, rows);
        png_destroy_read_struct(&png, &info, nullptr);
        return message;
    }
    png_set_read_fn(png, &state, png_read_from_memory);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (color & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    *width = png_get_image_width(png, info);
    *height = png_get_image_height(png, info);
    *channels = png_get_channels(png, info);
    *depth = png_get_bit_depth(png, info);
    const png_size_t stride = png_get_rowbytes(png, info);
    pixels->resize(stride * *height);
    rows = static_cast<png_bytep*>(png_malloc(png, sizeof(png_bytep) * *height));
    for (std::uint32_t y = 0; y < *height; ++y) {
        rows[y] = pixels->data() + y * stride;
    }
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    png_free(png, rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return nullptr;
}

Raster decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    std::uint32_t width = 0, height = 0;
    int channels = 0, depth = 0;
    std::vector<std::uint8_t> pixels;
    if (const char* err = decode_png_raw(&bytes, &width, &height, &channels, &depth, &pixels)) {
        throw FormatError(name + ": " + err);
    }
    if (channels != 1 && channels != 3) {
        throw FormatError(name + ": unsupported PNG channel layout");
    }
    Raster out(width, height, static_cast<std::size_t>(channels));
    if (depth == 16) {
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const std::uint32_t v = (static_cast<std::uint32_t>(pixels[2 * i]) << 8) | pixels[2 * i + 1];
            out.samples[i] = rescale_to_8bit(v, 65535);
        }
    } else {
        std::copy_n(pixels.begin(), out.samples.size(), out.samples.begin());
    }
    return out;
}

} // namespace

Raster load_raster(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    const std::string name = path.string();
    static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) {
        return decode_png(bytes, name);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' ||
                                                  bytes[1] == '6')) {
        return decode_pnm(bytes, name);
    }
    throw FormatError(name + ": unsupported image format (expected PNG, PGM or PPM)");
}

void save_png(const Raster& raster, const std::filesystem::path& path) {
    raster.validate();
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raster.width);
    image.height = static_cast<png_uint_32>(raster.height);
    image.format = raster.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::string file = path.string();
    if (!png_image_write_to_file(&image, file.c_str(), 0, raster.samples.data(),
                                 static_cast<png_int_32>(raster.width * raster.channels), nullptr)) {
        const std::string why = image.message;
        png_image_free(&image);
        throw IoError("cannot write PNG '" + file + "': " + why);
    }
}

void save_pnm(const Raster& raster, const std::filesystem::path& path) {
    raster.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << (raster.channels == 3 ? "P6" : "P5") << '\n' << raster.width << ' ' << raster.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.samples.data()),
              static_cast<std::streamsize>(raster.samples.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

} // namespace mrunet
