#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "mrunet/raster.hpp"
#include "mrunet/tensor.hpp"

namespace mrunet::test_util {

template <typename T = double>
Tensor<T> random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor<T> t(shape);
    for (T& v : t.values()) {
        v = static_cast<T>(dist(rng));
    }
    return t;
}

// Direct nested-loop convolution with zero padding (k-1)/2.
inline Tensor<double> conv_oracle(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>& b) {
    const std::size_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), wd = x.dim(3);
    const std::size_t cout = w.dim(0), k = w.dim(2);
    const long pad = static_cast<long>(k - 1) / 2;
    Tensor<double> out({n, cout, h, wd});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t xx = 0; xx < wd; ++xx) {
                    double acc = b[o];
                    for (std::size_t c = 0; c < cin; ++c)
                        for (std::size_t dy = 0; dy < k; ++dy)
                            for (std::size_t dx = 0; dx < k; ++dx) {
                                const long sy = static_cast<long>(y + dy) - pad;
                                const long sx = static_cast<long>(xx + dx) - pad;
                                if (sy < 0 || sx < 0 || sy >= static_cast<long>(h) || sx >= static_cast<long>(wd)) {
                                    continue;
                                }
                                acc += x.at(i, c, sy, sx) * w.at(o, c, dy, dx);
                            }
                    out.at(i, o, y, xx) = acc;
                }
    return out;
}

// Scatter form of a stride-2 2x2 transposed convolution.
inline Tensor<double> tconv_oracle(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>& b) {
    const std::size_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), wd = x.dim(3), cout = w.dim(1);
    Tensor<double> out({n, cout, 2 * h, 2 * wd});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t y = 0; y < 2 * h; ++y)
                for (std::size_t xx = 0; xx < 2 * wd; ++xx) {
                    out.at(i, o, y, xx) = b[o];
                }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < cin; ++c)
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t xx = 0; xx < wd; ++xx)
                    for (std::size_t o = 0; o < cout; ++o)
                        for (std::size_t dy = 0; dy < 2; ++dy)
                            for (std::size_t dx = 0; dx < 2; ++dx) {
                                out.at(i, o, 2 * y + dy, 2 * xx + dx) += x.at(i, c, y, xx) * w.at(c, o, dy, dx);
                            }
    return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mrunet_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Raster random_raster(std::size_t w, std::size_t h, std::size_t c, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(0, 255);
    Raster r(w, h, c);
    for (auto& s : r.samples) {
        s = static_cast<std::uint8_t>(dist(rng));
    }
    return r;
}

inline Raster random_mask(std::size_t w, std::size_t h, std::mt19937_64& rng, double p = 0.4) {
    std::bernoulli_distribution fg(p);
    Raster r(w, h, 1);
    for (auto& s : r.samples) {
        s = fg(rng) ? 255 : 0;
    }
    return r;
}

} // namespace mrunet::test_util
