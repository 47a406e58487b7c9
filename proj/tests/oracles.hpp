#pragma once

// Test-only reference computations, deliberately written without the library's
// tape or dense kernels.

#include <cmath>
#include <vector>

#include "curirl/network.hpp"
#include "curirl/rng.hpp"

namespace curirl::oracle {

using Matrix = std::vector<std::vector<long double>>;

inline Matrix to_matrix(const Tensor& t) {
    Matrix m(t.rows, std::vector<long double>(t.cols));
    for (std::size_t r = 0; r < t.rows; ++r)
        for (std::size_t c = 0; c < t.cols; ++c) m[r][c] = t(r, c);
    return m;
}

inline std::vector<long double> matvec_bias(const Matrix& w, const std::vector<long double>& x, const Tensor& b) {
    std::vector<long double> y(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        long double s = b.data[i];
        for (std::size_t j = x.size(); j-- > 0;) s += w[i][j] * x[j];
        y[i] = s;
    }
    return y;
}

/// Dense forward pass in extended precision.
inline std::vector<double> forward(const PolicyModel& m, Position2 s) {
    const auto& p = m.params;
    std::vector<long double> x = {(static_cast<long double>(s.x) - m.input.offset_x) * m.input.scale,
                                  (static_cast<long double>(s.z) - m.input.offset_z) * m.input.scale};
    auto h1 = matvec_bias(to_matrix(p.w1()), x, p.b1());
    for (auto& v : h1) v = v > 0 ? v : 0;
    auto h2 = matvec_bias(to_matrix(p.w2()), h1, p.b2());
    for (auto& v : h2) v = v > 0 ? v : 0;
    const auto y = matvec_bias(to_matrix(p.w3()), h2, p.b3());
    return std::vector<double>(y.begin(), y.end());
}

/// Entropy of softmax(y) computed directly from the definition in extended precision.
inline double softmax_entropy(const std::vector<double>& y) {
    long double m = y[0];
    for (double v : y) m = v > m ? v : m;
    long double z = 0;
    for (double v : y) z += std::exp(static_cast<long double>(v) - m);
    long double h = 0;
    for (double v : y) {
        const long double p = std::exp(static_cast<long double>(v) - m) / z;
        if (p > 0) h -= p * std::log(p);
    }
    return static_cast<double>(h);
}

/// A model whose parameters are all small random values (biases included).
inline PolicyModel random_model(std::uint64_t seed, std::size_t k = 8, std::size_t hidden = 16, double spread = 1.0) {
    PolicyModel m = init_model(2, hidden, k, seed, InitScheme::he_uniform);
    Rng rng(seed ^ 0xabcdefULL);
    for (auto& b : m.params.blocks)
        for (auto& v : b.data) v = v * spread + (b.cols == 1 ? rng.uniform(-0.5, 0.5) : 0.0);
    return m;
}

} // namespace curirl::oracle
