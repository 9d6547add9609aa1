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
#include "qvit/verify.hpp"

#include "qvit/attention.hpp"
#include "qvit/loaders.hpp"
#include "qvit/ortho.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace qvit::verify {

qsim::Circuit random_rbs_circuit(int n, int depth, Rng &rng) {
    qsim::Circuit c(n);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (int g = 0; g < depth; ++g) {
        const int a = qubit(rng);
        int b = qubit(rng);
        while (b == a) {
            b = qubit(rng);
        }
        c.append(qsim::Gate::rbs(a, b, angle(rng)));
    }
    return c;
}

std::vector<double> random_unit_vector(int n, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    double len = 0.0;
    while (len < 1e-6) {
        std::generate(v.begin(), v.end(), [&] { return normal(rng); });
        len = norm2(v);
    }
    for (double &x : v) {
        x /= len;
    }
    return v;
}

Matrix random_special_orthogonal(int n, Rng &rng) {
    // Gram-Schmidt on a Gaussian matrix, twice for numerical stability.
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto un = static_cast<std::size_t>(n);
    Matrix q(un, un);
    for (std::size_t r = 0; r < un; ++r) {
        for (std::size_t c = 0; c < un; ++c) {
            q(r, c) = normal(rng);
        }
    }
    for (std::size_t r = 0; r < un; ++r) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < r; ++k) {
                const double d = dot(q.row(r), q.row(k));
                for (std::size_t c = 0; c < un; ++c) {
                    q(r, c) -= d * q(k, c);
                }
            }
        }
        const double len = norm2(q.row(r));
        for (std::size_t c = 0; c < un; ++c) {
            q(r, c) /= len;
        }
    }
    if (determinant(q) < 0.0) {
        for (std::size_t c = 0; c < un; ++c) {
            q(0, c) = -q(0, c);
        }
    }
    return q;
}

namespace {

int trials(int base, const VerifyOptions &opts) {
    return std::max(1, static_cast<int>(std::lround(base * opts.effort)));
}

qsim::UnaryState unary_path(const qsim::Circuit &c, qsim::UnaryState s,
                            const VerifyOptions &opts) {
    if (!opts.inject_sign_fault) {
        return qsim::simulate_unary(c, std::move(s));
    }
    qsim::Circuit faulty = c;
    for (auto &g : faulty.gates) {
        g.angle = -g.angle;
    }
    return qsim::simulate_unary(faulty, std::move(s));
}

CheckResult finish(std::string name, double err, double tol, std::string detail = {}) {
    return {std::move(name), err <= tol, err, tol, std::move(detail)};
}

CheckResult check_unary_vs_dense(Rng &rng, const VerifyOptions &opts) {
    std::uniform_int_distribution<int> dim(2, 10), depth(1, 50);
    double worst = 0.0;
    const int n_trials = trials(100, opts);
    for (int t = 0; t < n_trials; ++t) {
        const int n = dim(rng);
        const auto c = random_rbs_circuit(n, depth(rng), rng);
        const auto x = random_unit_vector(n, rng);
        const auto fast = unary_path(c, qsim::UnaryState(x), opts);
        const auto dense = qsim::simulate_dense(c, qsim::to_dense(qsim::UnaryState(x)));
        for (int q = 0; q < n; ++q) {
            const auto ref = dense.amplitude(qsim::unary_index(n, q));
            worst = std::max(worst, std::abs(ref - std::complex<double>(fast[static_cast<std::size_t>(q)], 0.0)));
        }
        worst = std::max(worst, qsim::out_of_subspace_mass(dense));
    }
    return finish("unary_fast_path_matches_dense", worst, 1e-10,
                  std::to_string(n_trials) + " random circuits, n in [2, 10], depth <= 50");
}

CheckResult check_rbs_decomposition(Rng &rng, const VerifyOptions &opts) {
    std::uniform_real_distribution<double> angle(-2 * std::numbers::pi, 2 * std::numbers::pi);
    double worst = 0.0;
    for (int t = 0; t < trials(50, opts); ++t) {
        const double theta = angle(rng);
        qsim::Circuit c(2);
        for (const auto &g : qsim::rbs_decomposition(0, 1, theta)) {
            c.append(g);
        }
        const auto u = qsim::circuit_unitary(c);
        const Matrix ref = qsim::rbs_matrix(theta);
        // Remove the global phase using the largest entry.
        std::size_t pivot = 0;
        for (std::size_t k = 0; k < 16; ++k) {
            if (std::abs(u[k]) > std::abs(u[pivot])) {
                pivot = k;
            }
        }
        const std::complex<double> phase =
            ref.values()[pivot] / u[pivot] / std::abs(ref.values()[pivot] / u[pivot]);
        for (std::size_t k = 0; k < 16; ++k) {
            worst = std::max(worst, std::abs(phase * u[k] - ref.values()[k]));
        }
    }
    return finish("rbs_decomposition_matches_matrix", worst, 1e-12,
                  "H H CZ Ry Ry CZ H H up to global phase");
}

CheckResult check_loader(Rng &rng, const VerifyOptions &opts) {
    std::uniform_int_distribution<int> dim(2, 16);
    double worst = 0.0;
    std::string detail = "reconstruction sign * x";
    for (int t = 0; t < trials(1000, opts); ++t) {
        const int n = dim(rng);
        const auto x = random_unit_vector(n, rng);
        const auto prog = loaders::compute_loader_angles(x);
        const auto c = loaders::build_loader_circuit(prog);
        if (c.count(qsim::GateKind::RBS) != static_cast<std::size_t>(n - 1)) {
            return finish("loader_reconstructs_input", 1.0, 0.0,
                          "loader for n = " + std::to_string(n) + " has " +
                              std::to_string(c.count(qsim::GateKind::RBS)) + " RBS gates");
        }
        qsim::Circuit rot(n);
        for (const auto &g : c.gates) {
            if (g.kind == qsim::GateKind::RBS) {
                rot.append(g);
            }
        }
        const auto state = unary_path(rot, qsim::UnaryState::basis(n, 0), opts);
        for (int k = 0; k < n; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            worst = std::max(worst, std::abs(state[uk] - prog.sign * x[uk]));
        }
    }
    return finish("loader_reconstructs_input", worst, 1e-10, detail);
}

CheckResult check_adjoint_loader(Rng &rng, const VerifyOptions &opts) {
    std::uniform_int_distribution<int> dim(2, 8);
    double worst = 0.0;
    for (int t = 0; t < trials(100, opts); ++t) {
        const int n = dim(rng);
        const auto prog = loaders::compute_loader_angles(random_unit_vector(n, rng));
        qsim::Circuit round = loaders::build_loader_circuit(prog);
        round.append(loaders::build_adjoint_loader(prog, loaders::AdjointForm::kFull));
        const auto s = qsim::simulate_dense(round);
        worst = std::max(worst, std::abs(1.0 - std::abs(s.amplitude(0))));
    }
    return finish("adjoint_loader_returns_to_zero", worst, 1e-10);
}

CheckResult check_pyramid(Rng &rng, const VerifyOptions &opts) {
    double worst = 0.0;
    for (int n = 2; n <= 10; ++n) {
        const auto layer = ortho::random_layer(n, rng, 1.0);
        const auto c = ortho::layer_circuit(layer);
        if (c.count(qsim::GateKind::RBS) != static_cast<std::size_t>(ortho::pyramid_size(n))) {
            return finish("pyramid_orthogonal", 1.0, 0.0,
                          "pyramid for n = " + std::to_string(n) + " has wrong gate count");
        }
        const Matrix m = ortho::extract_matrix(layer);
        worst = std::max(worst, orthogonality_error(m));
        // Column k of the matrix is the circuit applied to e_k.
        for (int k = 0; k < n; ++k) {
            const auto out = unary_path(c, qsim::UnaryState::basis(n, k), opts);
            for (int r = 0; r < n; ++r) {
                worst = std::max(worst, std::abs(out[static_cast<std::size_t>(r)] -
                                                 m(static_cast<std::size_t>(r),
                                                   static_cast<std::size_t>(k))));
            }
        }
    }
    return finish("pyramid_orthogonal", worst, 1e-10,
                  "matrix orthogonal and equal to circuit action on e_k");
}

CheckResult check_compile(Rng &rng, const VerifyOptions &opts) {
    std::uniform_int_distribution<int> dim(2, 10);
    double worst = 0.0;
    for (int t = 0; t < trials(50, opts); ++t) {
        const Matrix target = random_special_orthogonal(dim(rng), rng);
        const auto layer = ortho::compile_matrix(target);
        worst = std::max(worst, max_abs_diff(ortho::extract_matrix(layer), target));
    }
    return finish("compile_extract_round_trip", worst, 1e-8);
}

CheckResult check_attention(Rng &rng, const VerifyOptions &opts) {
    std::uniform_int_distribution<int> dim(2, 10);
    double worst = 0.0;
    for (int t = 0; t < trials(200, opts); ++t) {
        const int n = dim(rng);
        const auto xi = random_unit_vector(n, rng);
        const auto xj = random_unit_vector(n, rng);
        const auto w = ortho::random_layer(n, rng, 1.0);
        const double fast = attention::attention_coefficient(xi, xj, w);
        double circuit = 0.0;
        if (opts.inject_sign_fault) {
            const auto c = attention::attention_circuit(xi, xj, w);
            qsim::Circuit rot(n);
            for (const auto &g : c.gates) {
                if (g.kind == qsim::GateKind::RBS) {
                    rot.append(g);
                }
            }
            circuit = qsim::prob_one(unary_path(rot, qsim::UnaryState::basis(n, 0), opts), 0);
        } else {
            circuit = attention::attention_coefficient_dense(xi, xj, w);
        }
        worst = std::max(worst, std::abs(fast - circuit));
    }
    return finish("attention_coefficient_matches_circuit", worst, 1e-10,
                  "(x_i^T W x_j)^2 against P(qubit 0 = 1)");
}

CheckResult check_layer_gradient(Rng &rng, const VerifyOptions &opts) {
    double worst = 0.0;
    const double h = 1e-6;
    for (int t = 0; t < trials(10, opts); ++t) {
        const int n = 2 + t % 7;
        auto layer = ortho::random_layer(n, rng, 1.0);
        const auto x = random_unit_vector(n, rng);
        const auto up = random_unit_vector(n, rng);
        const auto g = ortho::layer_grad(layer, x, up);
        for (std::size_t k = 0; k < layer.num_angles(); ++k) {
            const double keep = layer.angles()[k];
            layer.angles()[k] = keep + h;
            const double plus = dot(ortho::apply_layer(layer, x), up);
            layer.angles()[k] = keep - h;
            const double minus = dot(ortho::apply_layer(layer, x), up);
            layer.angles()[k] = keep;
            worst = std::max(worst, std::abs((plus - minus) / (2 * h) - g.angles[k]));
        }
    }
    return finish("pyramid_angle_gradient", worst, 1e-7, "central differences, step 1e-6");
}

} // namespace

std::vector<CheckResult> run_suite(const VerifyOptions &opts) {
    Rng rng(opts.seed);
    std::vector<CheckResult> out;
    out.push_back(check_unary_vs_dense(rng, opts));
    out.push_back(check_rbs_decomposition(rng, opts));
    out.push_back(check_loader(rng, opts));
    out.push_back(check_adjoint_loader(rng, opts));
    out.push_back(check_pyramid(rng, opts));
    out.push_back(check_compile(rng, opts));
    out.push_back(check_attention(rng, opts));
    out.push_back(check_layer_gradient(rng, opts));
    return out;
}

bool all_passed(const std::vector<CheckResult> &results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult &r) { return r.passed; });
}

} // namespace qvit::verify
