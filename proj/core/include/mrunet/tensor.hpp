#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrunet/errors.hpp"

namespace mrunet {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape);

/// Dense row-major array. 4-D tensors use the N x C x H x W layout.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;

    explicit Tensor(Shape shape, T fill = T{0}) : shape_(std::move(shape)) {
        check_dims();
        values_.assign(shape_size(shape_), fill);
    }

    Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
        check_dims();
        if (values_.size() != shape_size(shape_)) {
            throw ShapeError("tensor of shape " + shape_string(shape_) + " given " +
                             std::to_string(values_.size()) + " values");
        }
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }
    T* data() noexcept { return values_.data(); }
    const T* data() const noexcept { return values_.data(); }

    T& operator[](std::size_t i) noexcept { return values_[i]; }
    const T& operator[](std::size_t i) const noexcept { return values_[i]; }

    T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) noexcept {
        return values_[offset(n, c, y, x)];
    }
    const T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return values_[offset(n, c, y, x)];
    }

    /// Element-wise conversion to another scalar type.
    template <typename U>
    Tensor<U> cast() const {
        return Tensor<U>(shape_, std::vector<U>(values_.begin(), values_.end()));
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::size_t offset(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return ((n * shape_[1] + c) * shape_[2] + y) * shape_[3] + x;
    }

    void check_dims() const {
        for (std::size_t d : shape_) {
            if (d == 0) {
                throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
            }
        }
    }

    Shape shape_;
    std::vector<T> values_;
};

} // namespace mrunet
