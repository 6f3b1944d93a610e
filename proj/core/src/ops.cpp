#include "mrunet/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace mrunet {

std::string shape_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        out << (i ? "," : "") << shape[i];
    }
    out << ']';
    return out.str();
}

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

void require_rank4(const Shape& shape, const char* op) {
    if (shape.size() != 4) {
        throw ShapeError(std::string(op) + ": expected a 4-D tensor, got " + shape_string(shape));
    }
}

template <typename T>
void require_same_tape(const Var<T>& a, const Var<T>& b) {
    if (!a.valid() || a.tape() != b.tape()) {
        throw GraphError("operands are recorded on different tapes");
    }
}

// Gathers the k x k neighbourhoods of one image into a (C*k*k) x (H*W) matrix,
// reading zeros outside the image.
template <typename T>
void im2col(const T* image, std::size_t channels, std::size_t height, std::size_t width, std::size_t k,
            T* cols) {
    const auto pad = static_cast<std::ptrdiff_t>(k / 2);
    const auto h = static_cast<std::ptrdiff_t>(height);
    const auto w = static_cast<std::ptrdiff_t>(width);
    for (std::size_t c = 0; c < channels; ++c) {
        const T* plane = image + c * height * width;
        for (std::size_t dy = 0; dy < k; ++dy) {
            for (std::size_t dx = 0; dx < k; ++dx) {
                T* row = cols + ((c * k + dy) * k + dx) * height * width;
                const std::ptrdiff_t oy = static_cast<std::ptrdiff_t>(dy) - pad;
                const std::ptrdiff_t ox = static_cast<std::ptrdiff_t>(dx) - pad;
                const std::ptrdiff_t x_begin = std::max<std::ptrdiff_t>(0, -ox);
                const std::ptrdiff_t x_end = std::min<std::ptrdiff_t>(w, w - ox);
                for (std::ptrdiff_t y = 0; y < h; ++y) {
                    T* out = row + y * w;
                    const std::ptrdiff_t sy = y + oy;
                    if (sy < 0 || sy >= h) {
                        std::fill(out, out + w, T{0});
                        continue;
                    }
                    std::fill(out, out + x_begin, T{0});
                    const T* src = plane + sy * w + ox;
                    std::copy(src + x_begin, src + x_end, out + x_begin);
                    std::fill(out + x_end, out + w, T{0});
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds column gradients back onto the image.
template <typename T>
void col2im_add(const T* cols, std::size_t channels, std::size_t height, std::size_t width, std::size_t k,
                T* image) {
    const auto pad = static_cast<std::ptrdiff_t>(k / 2);
    const auto h = static_cast<std::ptrdiff_t>(height);
    const auto w = static_cast<std::ptrdiff_t>(width);
    for (std::size_t c = 0; c < channels; ++c) {
        T* plane = image + c * height * width;
        for (std::size_t dy = 0; dy < k; ++dy) {
            for (std::size_t dx = 0; dx < k; ++dx) {
                const T* row = cols + ((c * k + dy) * k + dx) * height * width;
                const std::ptrdiff_t oy = static_cast<std::ptrdiff_t>(dy) - pad;
                const std::ptrdiff_t ox = static_cast<std::ptrdiff_t>(dx) - pad;
                const std::ptrdiff_t x_begin = std::max<std::ptrdiff_t>(0, -ox);
                const std::ptrdiff_t x_end = std::min<std::ptrdiff_t>(w, w - ox);
                for (std::ptrdiff_t y = 0; y < h; ++y) {
                    const std::ptrdiff_t sy = y + oy;
                    if (sy < 0 || sy >= h) {
                        continue;
                    }
                    const T* in = row + y * w;
                    T* dst = plane + sy * w + ox;
                    for (std::ptrdiff_t x = x_begin; x < x_end; ++x) {
                        dst[x] += in[x];
                    }
                }
            }
        }
    }
}

template <typename T>
void add_into(std::span<T> dst, std::span<const T> src) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += src[i];
    }
}

} // namespace

template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weights, const Var<T>& bias) {
    require_same_tape(input, weights);
    require_same_tape(input, bias);
    const Shape& xs = input.shape();
    const Shape& ws = weights.shape();
    require_rank4(xs, "conv2d");
    require_rank4(ws, "conv2d weights");
    const std::size_t n = xs[0], cin = xs[1], h = xs[2], w = xs[3];
    const std::size_t cout = ws[0], k = ws[2];
    if (ws[1] != cin) {
        throw ShapeError("conv2d: weights expect " + std::to_string(ws[1]) + " input channels, input has " +
                         std::to_string(cin));
    }
    if (ws[3] != k || (k != 1 && k != 3)) {
        throw ShapeError("conv2d: kernel must be 1x1 or 3x3, got " + shape_string(ws));
    }
    if (bias.shape() != Shape{cout}) {
        throw ShapeError("conv2d: bias shape " + shape_string(bias.shape()) + " does not match " +
                         std::to_string(cout) + " output channels");
    }

    const std::size_t hw = h * w;
    const std::size_t patch = cin * k * k;
    Tensor<T> out({n, cout, h, w});
    {
        const Tensor<T>& x = input.value();
        ConstMatrixMap<T> wm(weights.value().data(), cout, patch);
        const T* b = bias.value().data();
        std::vector<T> cols(k == 1 ? 0 : patch * hw);
        for (std::size_t i = 0; i < n; ++i) {
            const T* image = x.data() + i * cin * hw;
            if (k != 1) {
                im2col(image, cin, h, w, k, cols.data());
            }
            ConstMatrixMap<T> cm(k == 1 ? image : cols.data(), patch, hw);
            MatrixMap<T> om(out.data() + i * cout * hw, cout, hw);
            om.noalias() = wm * cm;
            for (std::size_t o = 0; o < cout; ++o) {
                om.row(o).array() += b[o];
            }
        }
    }

    auto backward = [n, cin, cout, h, w, k, hw, patch](Tape<T>& tape, std::size_t self) {
        const auto& ids = tape.inputs(self);
        const std::size_t xi = ids[0], wi = ids[1], bi = ids[2];
        const Tensor<T>& x = tape.value(xi);
        const Tensor<T>& wt = tape.value(wi);
        std::span<T> g = tape.grad_buffer(self);
        const bool need_x = tape.requires_grad(xi);
        const bool need_w = tape.requires_grad(wi);
        const bool need_b = tape.requires_grad(bi);
        std::vector<T> cols(k == 1 ? 0 : patch * hw);
        std::vector<T> dcols(need_x ? patch * hw : 0);
        for (std::size_t i = 0; i < n; ++i) {
            ConstMatrixMap<T> gm(g.data() + i * cout * hw, cout, hw);
            const T* image = x.data() + i * cin * hw;
            if (need_w) {
                if (k != 1) {
                    im2col(image, cin, h, w, k, cols.data());
                }
                ConstMatrixMap<T> cm(k == 1 ? image : cols.data(), patch, hw);
                MatrixMap<T> dw(tape.grad_buffer(wi).data(), cout, patch);
                dw.noalias() += gm * cm.transpose();
            }
            if (need_b) {
                std::span<T> db = tape.grad_buffer(bi);
                for (std::size_t o = 0; o < cout; ++o) {
                    db[o] += gm.row(o).sum();
                }
            }
            if (need_x) {
                ConstMatrixMap<T> wm(wt.data(), cout, patch);
                T* dx = tape.grad_buffer(xi).data() + i * cin * hw;
                if (k == 1) {
                    MatrixMap<T> dxm(dx, cin, hw);
                    dxm.noalias() += wm.transpose() * gm;
                } else {
                    MatrixMap<T> dcm(dcols.data(), patch, hw);
                    dcm.noalias() = wm.transpose() * gm;
                    col2im_add(dcols.data(), cin, h, w, k, dx);
                }
            }
        }
    };
    return input.tape()->record(std::move(out), {input.id(), weights.id(), bias.id()}, std::move(backward));
}

namespace {

Shape pooled_shape(const Shape& xs, const char* op) {
    require_rank4(xs, op);
    if (xs[2] % 2 != 0 || xs[3] % 2 != 0) {
        throw ShapeError(std::string(op) + ": spatial size must be even, got " + shape_string(xs));
    }
    return {xs[0], xs[1], xs[2] / 2, xs[3] / 2};
}

} // namespace

template <typename T>
Var<T> max_pool2x2(const Var<T>& input) {
    const Shape& xs = input.shape();
    const Shape os = pooled_shape(xs, "max_pool2x2");
    const std::size_t planes = xs[0] * xs[1], h = xs[2], w = xs[3], oh = os[2], ow = os[3];
    const Tensor<T>& x = input.value();
    Tensor<T> out(os);
    std::vector<std::uint32_t> argmax(out.size());
    for (std::size_t p = 0; p < planes; ++p) {
        const T* src = x.data() + p * h * w;
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t xo = 0; xo < ow; ++xo) {
                const std::size_t base = 2 * y * w + 2 * xo;
                const std::size_t candidates[4] = {base, base + 1, base + w, base + w + 1};
                std::size_t best = candidates[0];
                for (std::size_t c = 1; c < 4; ++c) {
                    if (src[candidates[c]] > src[best]) {
                        best = candidates[c];
                    }
                }
                const std::size_t o = (p * oh + y) * ow + xo;
                out[o] = src[best];
                argmax[o] = static_cast<std::uint32_t>(best);
            }
        }
    }
    Tape<T>& tape = *input.tape();
    if (tape.tracking_branches()) {
        for (std::uint32_t a : argmax) {
            tape.note_branch(a);
        }
    }
    auto backward = [argmax = std::move(argmax), h, w, oh, ow, planes](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        std::span<T> g = tape.grad_buffer(self);
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t p = 0; p < planes; ++p) {
            for (std::size_t j = 0; j < oh * ow; ++j) {
                const std::size_t o = p * oh * ow + j;
                dx[p * h * w + argmax[o]] += g[o];
            }
        }
    };
    return input.tape()->record(std::move(out), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> avg_pool2x2(const Var<T>& input) {
    const Shape& xs = input.shape();
    const Shape os = pooled_shape(xs, "avg_pool2x2");
    const std::size_t planes = xs[0] * xs[1], h = xs[2], w = xs[3], oh = os[2], ow = os[3];
    const Tensor<T>& x = input.value();
    Tensor<T> out(os);
    for (std::size_t p = 0; p < planes; ++p) {
        const T* src = x.data() + p * h * w;
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t xo = 0; xo < ow; ++xo) {
                const std::size_t base = 2 * y * w + 2 * xo;
                out[(p * oh + y) * ow + xo] = (src[base] + src[base + 1] + src[base + w] + src[base + w + 1]) / T{4};
            }
        }
    }
    auto backward = [h, w, oh, ow, planes](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        std::span<T> g = tape.grad_buffer(self);
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t p = 0; p < planes; ++p) {
            T* dst = dx.data() + p * h * w;
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t xo = 0; xo < ow; ++xo) {
                    const T share = g[(p * oh + y) * ow + xo] / T{4};
                    const std::size_t base = 2 * y * w + 2 * xo;
                    dst[base] += share;
                    dst[base + 1] += share;
                    dst[base + w] += share;
                    dst[base + w + 1] += share;
                }
            }
        }
    };
    return input.tape()->record(std::move(out), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> transposed_conv2x2(const Var<T>& input, const Var<T>& weights, const Var<T>& bias) {
    require_same_tape(input, weights);
    require_same_tape(input, bias);
    const Shape& xs = input.shape();
    const Shape& ws = weights.shape();
    require_rank4(xs, "transposed_conv2x2");
    require_rank4(ws, "transposed_conv2x2 weights");
    const std::size_t n = xs[0], cin = xs[1], h = xs[2], w = xs[3];
    const std::size_t cout = ws[1];
    if (ws[0] != cin || ws[2] != 2 || ws[3] != 2) {
        throw ShapeError("transposed_conv2x2: weights " + shape_string(ws) + " incompatible with input " +
                         shape_string(xs));
    }
    if (bias.shape() != Shape{cout}) {
        throw ShapeError("transposed_conv2x2: bias shape " + shape_string(bias.shape()) + " does not match " +
                         std::to_string(cout) + " output channels");
    }
    const std::size_t hw = h * w, ow = 2 * w, ohw = 4 * hw;

    // tmp row (o*4 + dy*2 + dx), column (y*w + x) lands on output pixel (2y+dy, 2x+dx).
    Tensor<T> out({n, cout, 2 * h, 2 * w});
    {
        ConstMatrixMap<T> wm(weights.value().data(), cin, cout * 4);
        const T* b = bias.value().data();
        RowMatrix<T> tmp(cout * 4, hw);
        for (std::size_t i = 0; i < n; ++i) {
            ConstMatrixMap<T> xm(input.value().data() + i * cin * hw, cin, hw);
            tmp.noalias() = wm.transpose() * xm;
            T* dst = out.data() + i * cout * ohw;
            for (std::size_t o = 0; o < cout; ++o) {
                for (std::size_t q = 0; q < 4; ++q) {
                    const std::size_t dy = q / 2, dx = q % 2;
                    const T* row = tmp.data() + (o * 4 + q) * hw;
                    for (std::size_t y = 0; y < h; ++y) {
                        T* line = dst + o * ohw + (2 * y + dy) * ow + dx;
                        for (std::size_t x = 0; x < w; ++x) {
                            line[2 * x] = row[y * w + x] + b[o];
                        }
                    }
                }
            }
        }
    }

    auto backward = [n, cin, cout, h, w, hw, ow, ohw](Tape<T>& tape, std::size_t self) {
        const auto& ids = tape.inputs(self);
        const std::size_t xi = ids[0], wi = ids[1], bi = ids[2];
        std::span<T> g = tape.grad_buffer(self);
        const bool need_x = tape.requires_grad(xi);
        const bool need_w = tape.requires_grad(wi);
        const bool need_b = tape.requires_grad(bi);
        RowMatrix<T> dtmp(cout * 4, hw);
        for (std::size_t i = 0; i < n; ++i) {
            const T* src = g.data() + i * cout * ohw;
            for (std::size_t o = 0; o < cout; ++o) {
                for (std::size_t q = 0; q < 4; ++q) {
                    const std::size_t dy = q / 2, dx = q % 2;
                    T* row = dtmp.data() + (o * 4 + q) * hw;
                    for (std::size_t y = 0; y < h; ++y) {
                        const T* line = src + o * ohw + (2 * y + dy) * ow + dx;
                        for (std::size_t x = 0; x < w; ++x) {
                            row[y * w + x] = line[2 * x];
                        }
                    }
                }
            }
            if (need_b) {
                std::span<T> db = tape.grad_buffer(bi);
                for (std::size_t o = 0; o < cout; ++o) {
                    db[o] += dtmp.middleRows(o * 4, 4).sum();
                }
            }
            if (need_w) {
                ConstMatrixMap<T> xm(tape.value(xi).data() + i * cin * hw, cin, hw);
                MatrixMap<T> dw(tape.grad_buffer(wi).data(), cin, cout * 4);
                dw.noalias() += xm * dtmp.transpose();
            }
            if (need_x) {
                ConstMatrixMap<T> wm(tape.value(wi).data(), cin, cout * 4);
                MatrixMap<T> dx(tape.grad_buffer(xi).data() + i * cin * hw, cin, hw);
                dx.noalias() += wm * dtmp;
            }
        }
    };
    return input.tape()->record(std::move(out), {input.id(), weights.id(), bias.id()}, std::move(backward));
}

template <typename T>
Var<T> relu(const Var<T>& input) {
    const Tensor<T>& x = input.value();
    Tensor<T> out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] > T{0} ? x[i] : T{0};
    }
    Tape<T>& tape = *input.tape();
    if (tape.tracking_branches()) {
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            word = (word << 1) | (x[i] > T{0} ? 1u : 0u);
            if (i % 64 == 63 || i + 1 == x.size()) {
                tape.note_branch(word);
                word = 0;
            }
        }
    }
    auto backward = [](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        const Tensor<T>& x = tape.value(xi);
        std::span<T> g = tape.grad_buffer(self);
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t i = 0; i < dx.size(); ++i) {
            if (x[i] > T{0}) {
                dx[i] += g[i];
            }
        }
    };
    return input.tape()->record(std::move(out), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
    require_same_tape(a, b);
    const Shape& as = a.shape();
    const Shape& bs = b.shape();
    require_rank4(as, "concat_channels");
    require_rank4(bs, "concat_channels");
    if (as[0] != bs[0] || as[2] != bs[2] || as[3] != bs[3]) {
        throw ShapeError("concat_channels: batch/spatial mismatch " + shape_string(as) + " vs " + shape_string(bs));
    }
    const std::size_t n = as[0], hw = as[2] * as[3];
    const std::size_t a_block = as[1] * hw, b_block = bs[1] * hw;
    Tensor<T> out({n, as[1] + bs[1], as[2], as[3]});
    for (std::size_t i = 0; i < n; ++i) {
        T* dst = out.data() + i * (a_block + b_block);
        std::copy_n(a.value().data() + i * a_block, a_block, dst);
        std::copy_n(b.value().data() + i * b_block, b_block, dst + a_block);
    }
    auto backward = [n, a_block, b_block](Tape<T>& tape, std::size_t self) {
        const auto& ids = tape.inputs(self);
        std::span<T> g = tape.grad_buffer(self);
        for (std::size_t i = 0; i < n; ++i) {
            const T* src = g.data() + i * (a_block + b_block);
            if (tape.requires_grad(ids[0])) {
                add_into<T>(tape.grad_buffer(ids[0]).subspan(i * a_block, a_block), {src, a_block});
            }
            if (tape.requires_grad(ids[1])) {
                add_into<T>(tape.grad_buffer(ids[1]).subspan(i * b_block, b_block), {src + a_block, b_block});
            }
        }
    };
    return a.tape()->record(std::move(out), {a.id(), b.id()}, std::move(backward));
}

template <typename T>
Var<T> softmax_channels(const Var<T>& input) {
    const Shape& xs = input.shape();
    require_rank4(xs, "softmax_channels");
    if (xs[1] < 2) {
        throw ShapeError("softmax_channels: need at least 2 channels, got " + shape_string(xs));
    }
    const std::size_t n = xs[0], c = xs[1], hw = xs[2] * xs[3];
    const Tensor<T>& x = input.value();
    Tensor<T> out(xs);
    for (std::size_t i = 0; i < n; ++i) {
        const T* src = x.data() + i * c * hw;
        T* dst = out.data() + i * c * hw;
        for (std::size_t p = 0; p < hw; ++p) {
            T peak = src[p];
            for (std::size_t ch = 1; ch < c; ++ch) {
                peak = std::max(peak, src[ch * hw + p]);
            }
            T total{0};
            for (std::size_t ch = 0; ch < c; ++ch) {
                dst[ch * hw + p] = std::exp(src[ch * hw + p] - peak);
                total += dst[ch * hw + p];
            }
            for (std::size_t ch = 0; ch < c; ++ch) {
                dst[ch * hw + p] /= total;
            }
        }
    }
    auto backward = [n, c, hw](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        const Tensor<T>& y = tape.value(self);
        std::span<T> g = tape.grad_buffer(self);
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t base = i * c * hw;
            for (std::size_t p = 0; p < hw; ++p) {
                T dot{0};
                for (std::size_t ch = 0; ch < c; ++ch) {
                    dot += g[base + ch * hw + p] * y[base + ch * hw + p];
                }
                for (std::size_t ch = 0; ch < c; ++ch) {
                    const std::size_t at = base + ch * hw + p;
                    dx[at] += y[at] * (g[at] - dot);
                }
            }
        }
    };
    return input.tape()->record(std::move(out), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> sum(const Var<T>& input) {
    const auto values = input.value().values();
    T total{0};
    for (T v : values) {
        total += v;
    }
    auto backward = [](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        const T g = tape.grad_buffer(self)[0];
        for (T& d : tape.grad_buffer(xi)) {
            d += g;
        }
    };
    return input.tape()->record(Tensor<T>({1}, {total}), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> weighted_sum(const Var<T>& input, const Tensor<T>& weights) {
    if (weights.shape() != input.shape()) {
        throw ShapeError("weighted_sum: weights " + shape_string(weights.shape()) + " vs input " +
                         shape_string(input.shape()));
    }
    const Tensor<T>& x = input.value();
    T total{0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += x[i] * weights[i];
    }
    auto backward = [weights](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        const T g = tape.grad_buffer(self)[0];
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] += g * weights[i];
        }
    };
    return input.tape()->record(Tensor<T>({1}, {total}), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> square(const Var<T>& input) {
    const Tensor<T>& x = input.value();
    Tensor<T> out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] * x[i];
    }
    auto backward = [](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        const Tensor<T>& x = tape.value(xi);
        std::span<T> g = tape.grad_buffer(self);
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] += T{2} * x[i] * g[i];
        }
    };
    return input.tape()->record(std::move(out), {input.id()}, std::move(backward));
}

template <typename T>
Var<T> scale(const Var<T>& input, T factor) {
    const Tensor<T>& x = input.value();
    Tensor<T> out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] * factor;
    }
    auto backward = [factor](Tape<T>& tape, std::size_t self) {
        const std::size_t xi = tape.inputs(self)[0];
        std::span<T> g = tape.grad_buffer(self);
        std::span<T> dx = tape.grad_buffer(xi);
        for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] += factor * g[i];
        }
    };
    return input.tape()->record(std::move(out), {input.id()}, std::move(backward));
}

#define MRUNET_INSTANTIATE_OPS(T)                                                   \
    template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>&);             \
    template Var<T> max_pool2x2(const Var<T>&);                                      \
    template Var<T> avg_pool2x2(const Var<T>&);                                      \
    template Var<T> transposed_conv2x2(const Var<T>&, const Var<T>&, const Var<T>&); \
    template Var<T> relu(const Var<T>&);                                             \
    template Var<T> concat_channels(const Var<T>&, const Var<T>&);                   \
    template Var<T> softmax_channels(const Var<T>&);                                 \
    template Var<T> sum(const Var<T>&);                                              \
    template Var<T> weighted_sum(const Var<T>&, const Tensor<T>&);                   \
    template Var<T> square(const Var<T>&);                                           \
    template Var<T> scale(const Var<T>&, T);

MRUNET_INSTANTIATE_OPS(float)
MRUNET_INSTANTIATE_OPS(double)

} // namespace mrunet
