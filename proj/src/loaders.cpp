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
#include "qvit/loaders.hpp"

#include "qvit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qvit::loaders {

LoaderProgram compute_loader_angles(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) {
        throw DimensionError("compute_loader_angles: need dimension >= 2");
    }
    double sq = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw DomainError("compute_loader_angles: non-finite component");
        }
        sq += v * v;
    }
    if (sq == 0.0) {
        throw DomainError("compute_loader_angles: zero vector");
    }
    const double nrm = std::sqrt(sq);
    if (std::abs(nrm - 1.0) > kUnitTolerance) {
        throw DomainError("compute_loader_angles: input norm " +
                          std::to_string(nrm) + " is not 1");
    }

    LoaderProgram prog;
    std::size_t last = n - 1;
    while (x[last] == 0.0) {
        --last;
    }
    prog.sign = x[last] < 0.0 ? -1 : 1;

    prog.angles.assign(n - 1, 0.0);
    double prod = 1.0; // Π_{j<k} sin α_j
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (prod < kDegenerateProduct) {
            break;
        }
        const double arg = std::clamp(prog.sign * x[k] / prod, -1.0, 1.0);
        prog.angles[k] = std::acos(arg);
        prod *= std::sin(prog.angles[k]);
    }
    return prog;
}

std::vector<double> decode(const LoaderProgram &prog) {
    const std::size_t n = prog.angles.size() + 1;
    std::vector<double> a(n);
    double prod = 1.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        a[k] = prod * std::cos(prog.angles[k]);
        prod *= std::sin(prog.angles[k]);
    }
    a[n - 1] = prod;
    return a;
}

std::vector<double> recover(const LoaderProgram &prog) {
    std::vector<double> a = decode(prog);
    for (double &v : a) {
        v *= prog.sign;
    }
    return a;
}

qsim::Circuit build_loader_circuit(const LoaderProgram &prog) {
    const int n = prog.dim();
    qsim::Circuit c(n);
    c.append(qsim::Gate::x(0));
    for (int k = 0; k + 1 < n; ++k) {
        c.append(qsim::Gate::rbs(k, k + 1, prog.angles[static_cast<std::size_t>(k)]));
    }
    return c;
}

qsim::Circuit build_adjoint_loader(const LoaderProgram &prog, AdjointForm form) {
    qsim::Circuit inv = build_loader_circuit(prog).inverse();
    if (form == AdjointForm::kRotationsOnly) {
        inv.gates.pop_back(); // trailing X(0)
    }
    return inv;
}

qsim::UnaryState load_unary(const LoaderProgram &prog) {
    const int n = prog.dim();
    qsim::UnaryState s = qsim::UnaryState::basis(n, 0);
    for (int k = 0; k + 1 < n; ++k) {
        qsim::apply_rbs(s, k, k + 1, prog.angles[static_cast<std::size_t>(k)]);
    }
    return s;
}

} // namespace qvit::loaders
