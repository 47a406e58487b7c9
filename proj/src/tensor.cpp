#include "curirl/tensor.hpp"

#include <cmath>
#include <string>

#include "curirl/error.hpp"

namespace curirl {

bool ParameterTensors::all_finite() const noexcept {
    for (const auto& b : blocks)
        for (double v : b.data)
            if (!std::isfinite(v)) return false;
    return true;
}

ParameterTensors ParameterTensors::zeros_like() const {
    ParameterTensors out;
    for (std::size_t i = 0; i < count; ++i) out.blocks[i] = Tensor::zeros(blocks[i].rows, blocks[i].cols);
    return out;
}

double& ParameterTensors::at(std::size_t flat) {
    for (auto& b : blocks) {
        if (flat < b.size()) return b.data[flat];
        flat -= b.size();
    }
    fail(ErrorKind::invalid_argument, "parameter index out of range");
}

double ParameterTensors::at(std::size_t flat) const { return const_cast<ParameterTensors*>(this)->at(flat); }

std::string ParameterTensors::describe(std::size_t flat) const {
    for (std::size_t i = 0; i < count; ++i) {
        const auto& b = blocks[i];
        if (flat < b.size()) {
            return std::string(names[i]) + "[" + std::to_string(flat / b.cols) + "," +
                   std::to_string(flat % b.cols) + "]";
        }
        flat -= b.size();
    }
    return "?";
}

} // namespace curirl
