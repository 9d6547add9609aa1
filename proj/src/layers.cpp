// Copyright 2026 The QViT Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qvit/layers.hpp"

#include "qvit/errors.hpp"

#include <cmath>
#include <numbers>

namespace qvit::layers {

Matrix layer_norm_forward(const Matrix &x, std::span<const double> gamma,
                          std::span<const double> beta, LayerNormCache *cache) {
    const std::size_t d = x.cols();
    if (gamma.size() != d || beta.size() != d) {
        throw DimensionError("layer_norm: gamma/beta length mismatch");
    }
    Matrix y(x.rows(), d);
    Matrix xhat(x.rows(), d);
    std::vector<double> rstd(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        double mean = 0.0;
        for (double v : row) {
            mean += v;
        }
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (double v : row) {
            var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(d);
        rstd[i] = 1.0 / std::sqrt(var + kLayerNormEps);
        for (std::size_t k = 0; k < d; ++k) {
            xhat(i, k) = (row[k] - mean) * rstd[i];
            y(i, k) = gamma[k] * xhat(i, k) + beta[k];
        }
    }
    if (cache) {
        cache->normalized = std::move(xhat);
        cache->rstd = std::move(rstd);
    }
    return y;
}

Matrix layer_norm_backward(const LayerNormCache &cache, std::span<const double> gamma,
                           const Matrix &dy, std::span<double> d_gamma,
                           std::span<double> d_beta) {
    const Matrix &xhat = cache.normalized;
    const std::size_t d = xhat.cols();
    Matrix dx(xhat.rows(), d);
    std::vector<double> dxhat(d);
    for (std::size_t i = 0; i < xhat.rows(); ++i) {
        double mean_dxhat = 0.0;
        double mean_dxhat_xhat = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            d_gamma[k] += dy(i, k) * xhat(i, k);
            d_beta[k] += dy(i, k);
            dxhat[k] = dy(i, k) * gamma[k];
            mean_dxhat += dxhat[k];
            mean_dxhat_xhat += dxhat[k] * xhat(i, k);
        }
        mean_dxhat /= static_cast<double>(d);
        mean_dxhat_xhat /= static_cast<double>(d);
        for (std::size_t k = 0; k < d; ++k) {
            dx(i, k) = cache.rstd[i] *
                       (dxhat[k] - mean_dxhat - xhat(i, k) * mean_dxhat_xhat);
        }
    }
    return dx;
}

double gelu(double x) noexcept {
    return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

double gelu_grad(double x) noexcept {
    const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return cdf + x * pdf;
}

Matrix gelu(const Matrix &x) {
    Matrix y = x;
    for (double &v : y.data()) {
        v = gelu(v);
    }
    return y;
}

Matrix gelu_backward(const Matrix &x, const Matrix &dy) {
    Matrix dx = dy;
    for (std::size_t k = 0; k < dx.size(); ++k) {
        dx.data()[k] *= gelu_grad(x.data()[k]);
    }
    return dx;
}

Matrix linear_forward(const Matrix &x, const Matrix &w, std::span<const double> b) {
    if (x.cols() != w.cols() || b.size() != w.rows()) {
        throw DimensionError("linear: shape mismatch");
    }
    Matrix y(x.rows(), w.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        for (std::size_t o = 0; o < w.rows(); ++o) {
            y(i, o) = dot(w.row(o), xi) + b[o];
        }
    }
    return y;
}

Matrix linear_backward(const Matrix &x, const Matrix &w, const Matrix &dy, Matrix &dw,
                       std::span<double> db) {
    Matrix dx(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        auto dxi = dx.row(i);
        for (std::size_t o = 0; o < w.rows(); ++o) {
            const double g = dy(i, o);
            db[o] += g;
            auto dwo = dw.row(o);
            const auto wo = w.row(o);
            for (std::size_t k = 0; k < x.cols(); ++k) {
                dwo[k] += g * xi[k];
                dxi[k] += g * wo[k];
            }
        }
    }
    return dx;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng &rng) {
    Matrix m(rows, cols);
    const double keep = 1.0 - rate;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double &v : m.data()) {
        v = u(rng) < keep ? 1.0 / keep : 0.0;
    }
    return m;
}

Matrix apply_mask(const Matrix &x, const Matrix &mask) {
    if (mask.size() == 0) {
        return x;
    }
    Matrix y = x;
    for (std::size_t k = 0; k < y.size(); ++k) {
        y.data()[k] *= mask.data()[k];
    }
    return y;
}

} // namespace qvit::layers
