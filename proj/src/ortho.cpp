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
#include "qvit/ortho.hpp"

#include "qvit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace qvit::ortho {

namespace {

struct Slot {
    int t;
    int q;
};

std::vector<Slot> schedule(int n) {
    if (n < 2) {
        throw DimensionError("pyramid: need n >= 2, got " + std::to_string(n));
    }
    std::vector<Slot> s;
    s.reserve(static_cast<std::size_t>(pyramid_size(n)));
    for (int t = 0; t <= 2 * n - 4; ++t) {
        const int top = std::min(t, 2 * n - 4 - t);
        for (int q = t % 2; q <= top; q += 2) {
            s.push_back({t, q});
        }
    }
    return s;
}

void check_dim(std::size_t got, int n, const char *what) {
    if (got != static_cast<std::size_t>(n)) {
        throw DimensionError(std::string(what) + ": expected dimension " +
                             std::to_string(n) + ", got " + std::to_string(got));
    }
}

inline void rotate(double &a1, double &a2, double c, double s) {
    const double x1 = a1;
    const double x2 = a2;
    a1 = c * x1 - s * x2;
    a2 = s * x1 + c * x2;
}

} // namespace

std::vector<RbsPair> pyramid_wiring(int n) {
    std::vector<RbsPair> w;
    for (const auto &slot : schedule(n)) {
        w.push_back({slot.q, slot.q + 1});
    }
    return w;
}

std::vector<int> pyramid_time_steps(int n) {
    std::vector<int> t;
    for (const auto &slot : schedule(n)) {
        t.push_back(slot.t);
    }
    return t;
}

PyramidLayer::PyramidLayer(int n)
    : n_(n), angles_(static_cast<std::size_t>(std::max(0, pyramid_size(n))), 0.0),
      wiring_(pyramid_wiring(n)) {}

PyramidLayer::PyramidLayer(int n, std::vector<double> angles)
    : n_(n), angles_(std::move(angles)), wiring_(pyramid_wiring(n)) {
    if (angles_.size() != wiring_.size()) {
        throw DimensionError("PyramidLayer: expected " +
                             std::to_string(wiring_.size()) + " angles, got " +
                             std::to_string(angles_.size()));
    }
}

PyramidLayer random_layer(int n, std::mt19937_64 &rng, double stddev) {
    PyramidLayer layer(n);
    std::normal_distribution<double> dist(0.0, stddev);
    for (double &a : layer.angles()) {
        a = dist(rng);
    }
    return layer;
}

qsim::Circuit layer_circuit(const PyramidLayer &layer) {
    qsim::Circuit c(layer.dim());
    const auto angles = layer.angles();
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const auto &p = layer.wiring()[k];
        c.append(qsim::Gate::rbs(p.q1, p.q2, angles[k]));
    }
    return c;
}

Matrix extract_matrix(const PyramidLayer &layer) {
    const std::size_t n = static_cast<std::size_t>(layer.dim());
    Matrix m = Matrix::identity(n);
    const auto angles = layer.angles();
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const auto &p = layer.wiring()[k];
        const double c = std::cos(angles[k]);
        const double s = std::sin(angles[k]);
        auto r1 = m.row(static_cast<std::size_t>(p.q1));
        auto r2 = m.row(static_cast<std::size_t>(p.q2));
        for (std::size_t j = 0; j < n; ++j) {
            rotate(r1[j], r2[j], c, s);
        }
    }
    return m;
}

void apply_layer_inplace(const PyramidLayer &layer, std::span<double> x) {
    check_dim(x.size(), layer.dim(), "apply_layer");
    const auto angles = layer.angles();
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const auto &p = layer.wiring()[k];
        rotate(x[static_cast<std::size_t>(p.q1)], x[static_cast<std::size_t>(p.q2)],
               std::cos(angles[k]), std::sin(angles[k]));
    }
}

std::vector<double> apply_layer(const PyramidLayer &layer,
                                std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    apply_layer_inplace(layer, y);
    return y;
}

std::vector<double> apply_layer_transposed(const PyramidLayer &layer,
                                           std::span<const double> x) {
    check_dim(x.size(), layer.dim(), "apply_layer_transposed");
    std::vector<double> y(x.begin(), x.end());
    const auto angles = layer.angles();
    for (std::size_t k = angles.size(); k-- > 0;) {
        const auto &p = layer.wiring()[k];
        rotate(y[static_cast<std::size_t>(p.q1)], y[static_cast<std::size_t>(p.q2)],
               std::cos(angles[k]), -std::sin(angles[k]));
    }
    return y;
}

PyramidLayer compile_matrix(const Matrix &m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("compile_matrix: matrix is not square");
    }
    const int n = static_cast<int>(m.rows());
    if (n < 2) {
        throw DimensionError("compile_matrix: need n >= 2");
    }
    for (double v : m.data()) {
        if (!std::isfinite(v)) {
            throw NotOrthogonalError("compile_matrix: non-finite entry");
        }
    }
    const double orth = orthogonality_error(m);
    if (orth > kCompileOrthTolerance) {
        throw NotOrthogonalError("compile_matrix: max |MᵀM - I| = " +
                                 std::to_string(orth));
    }
    const double det = determinant(m);
    if (std::abs(det + 1.0) <= kCompileDetTolerance) {
        throw NegativeDeterminantError(
            "compile_matrix: det(M) = -1; pyramid layers span SO(n) only");
    }
    if (std::abs(det - 1.0) > kCompileDetTolerance) {
        throw NotOrthogonalError("compile_matrix: det(M) = " + std::to_string(det));
    }

    std::map<std::pair<int, int>, std::size_t> index;
    const auto slots = schedule(n);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        index[{slots[k].t, slots[k].q}] = k;
    }

    std::vector<double> angles(slots.size(), 0.0);
    Matrix r = m;
    const std::size_t un = static_cast<std::size_t>(n);
    for (int size = n; size >= 2; --size) {
        const std::size_t col = static_cast<std::size_t>(size - 1);
        for (int i = 0; i + 1 < size; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            const double a = r(ui, col);
            const double b = r(ui + 1, col);
            const double theta = (a == 0.0 && b >= 0.0) ? 0.0 : std::atan2(-a, b);
            angles[index.at({2 * size - 4 - i, i})] = theta;
            // R <- G(theta)ᵀ R zeroes r(i, col) and leaves r(i+1, col) >= 0.
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            auto r1 = r.row(ui);
            auto r2 = r.row(ui + 1);
            for (std::size_t j = 0; j < un; ++j) {
                rotate(r1[j], r2[j], c, -s);
            }
        }
    }
    PyramidLayer layer(n, std::move(angles));
    const double residual = max_abs_diff(extract_matrix(layer), m);
    if (residual > kCompileOrthTolerance) {
        throw NotOrthogonalError("compile_matrix: reconstruction residual " +
                                 std::to_string(residual));
    }
    return layer;
}

void layer_grad_accumulate(const PyramidLayer &layer, std::span<const double> x,
                           std::span<const double> upstream,
                           std::span<double> grad_angles,
                           std::span<double> grad_x) {
    const int n = layer.dim();
    check_dim(x.size(), n, "layer_grad");
    check_dim(upstream.size(), n, "layer_grad");
    check_dim(grad_x.size(), n, "layer_grad");
    const auto angles = layer.angles();
    if (grad_angles.size() != angles.size()) {
        throw DimensionError("layer_grad: angle gradient has wrong length");
    }
    const std::size_t k_total = angles.size();

    // Forward, keeping the pair values each gate saw.
    std::vector<double> state(x.begin(), x.end());
    std::vector<double> seen(2 * k_total);
    std::vector<double> cs(k_total), sn(k_total);
    for (std::size_t k = 0; k < k_total; ++k) {
        const auto &p = layer.wiring()[k];
        double &a1 = state[static_cast<std::size_t>(p.q1)];
        double &a2 = state[static_cast<std::size_t>(p.q2)];
        seen[2 * k] = a1;
        seen[2 * k + 1] = a2;
        cs[k] = std::cos(angles[k]);
        sn[k] = std::sin(angles[k]);
        rotate(a1, a2, cs[k], sn[k]);
    }

    std::vector<double> g(upstream.begin(), upstream.end());
    for (std::size_t k = k_total; k-- > 0;) {
        const auto &p = layer.wiring()[k];
        const double c = cs[k];
        const double s = sn[k];
        const double x1 = seen[2 * k];
        const double x2 = seen[2 * k + 1];
        double &g1 = g[static_cast<std::size_t>(p.q1)];
        double &g2 = g[static_cast<std::size_t>(p.q2)];
        grad_angles[k] += g1 * (-s * x1 - c * x2) + g2 * (c * x1 - s * x2);
        rotate(g1, g2, c, -s);
    }
    for (int i = 0; i < n; ++i) {
        grad_x[static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
    }
}

LayerGrad layer_grad(const PyramidLayer &layer, std::span<const double> x,
                     std::span<const double> upstream) {
    LayerGrad out;
    out.angles.assign(layer.num_angles(), 0.0);
    out.x.assign(static_cast<std::size_t>(layer.dim()), 0.0);
    layer_grad_accumulate(layer, x, upstream, out.angles, out.x);
    return out;
}

} // namespace qvit::ortho
