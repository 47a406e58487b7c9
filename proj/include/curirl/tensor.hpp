#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curirl {

/// Dense row-major matrix of doubles; a vector is a rows x 1 tensor.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    static Tensor zeros(std::size_t r, std::size_t c) { return Tensor{r, c, std::vector<double>(r * c, 0.0)}; }

    std::size_t size() const noexcept { return data.size(); }
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool same_shape(const Tensor& o) const noexcept { return rows == o.rows && cols == o.cols; }
    bool operator==(const Tensor&) const = default;
};

/// The six parameter blocks of the preference network.
struct ParameterTensors {
    static constexpr std::size_t count = 6;
    static constexpr std::array<std::string_view, count> names = {"w1", "b1", "w2", "b2", "w3", "b3"};

    std::array<Tensor, count> blocks;

    Tensor& w1() { return blocks[0]; }
    Tensor& b1() { return blocks[1]; }
    Tensor& w2() { return blocks[2]; }
    Tensor& b2() { return blocks[3]; }
    Tensor& w3() { return blocks[4]; }
    Tensor& b3() { return blocks[5]; }
    const Tensor& w1() const { return blocks[0]; }
    const Tensor& b1() const { return blocks[1]; }
    const Tensor& w2() const { return blocks[2]; }
    const Tensor& b2() const { return blocks[3]; }
    const Tensor& w3() const { return blocks[4]; }
    const Tensor& b3() const { return blocks[5]; }

    std::size_t total_size() const noexcept {
        std::size_t n = 0;
        for (const auto& b : blocks) n += b.size();
        return n;
    }
    bool same_shape(const ParameterTensors& o) const noexcept {
        for (std::size_t i = 0; i < count; ++i)
            if (!blocks[i].same_shape(o.blocks[i])) return false;
        return true;
    }
    bool all_finite() const noexcept;
    /// Same shapes, all zeros.
    ParameterTensors zeros_like() const;
    /// Flat view index -> (block, offset).
    double& at(std::size_t flat);
    double at(std::size_t flat) const;
    /// Human-readable name of a flat index, e.g. "w2[3,17]".
    std::string describe(std::size_t flat) const;

    bool operator==(const ParameterTensors&) const = default;
};

} // namespace curirl
