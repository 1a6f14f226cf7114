#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailscope {

// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    [[nodiscard]] double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace tailscope
