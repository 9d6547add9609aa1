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
#include "qvit/qsim.hpp"

#include "qvit/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

namespace qvit::qsim {

namespace {

using cplx = std::complex<double>;

std::uint64_t qubit_mask(int n, int q) {
    return std::uint64_t{1} << static_cast<unsigned>(n - 1 - q);
}

void check_qubit(int q, int n, const char *what) {
    if (q < 0 || q >= n) {
        throw DimensionError(std::string(what) + ": qubit " + std::to_string(q) +
                             " out of range for " + std::to_string(n) +
                             " qubits");
    }
}

const char *gate_name(GateKind k) {
    switch (k) {
    case GateKind::X:
        return "X";
    case GateKind::H:
        return "H";
    case GateKind::CZ:
        return "CZ";
    case GateKind::Ry:
        return "RY";
    case GateKind::RBS:
        return "RBS";
    }
    return "?";
}

} // namespace

void validate_gate(const Gate &gate, int n_qubits) {
    check_qubit(gate.q1, n_qubits, gate_name(gate.kind));
    if (gate.is_two_qubit()) {
        check_qubit(gate.q2, n_qubits, gate_name(gate.kind));
        if (gate.q1 == gate.q2) {
            throw DomainError(std::string(gate_name(gate.kind)) +
                              ": qubits must be distinct");
        }
    }
    if (!std::isfinite(gate.angle)) {
        throw DomainError(std::string(gate_name(gate.kind)) +
                          ": angle is not finite");
    }
}

Circuit::Circuit(int n) : n_qubits(n) {
    if (n < 1) {
        throw DimensionError("Circuit: need at least one qubit");
    }
}

Circuit &Circuit::append(const Gate &g) {
    validate_gate(g, n_qubits);
    gates.push_back(g);
    return *this;
}

Circuit &Circuit::append(const Circuit &other) {
    if (other.n_qubits != n_qubits) {
        throw DimensionError("Circuit::append: register sizes differ");
    }
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
    return *this;
}

void Circuit::validate() const {
    if (n_qubits < 1) {
        throw DimensionError("Circuit: need at least one qubit");
    }
    for (const auto &g : gates) {
        validate_gate(g, n_qubits);
    }
}

std::size_t Circuit::count(GateKind kind) const {
    std::size_t c = 0;
    for (const auto &g : gates) {
        c += g.kind == kind ? 1 : 0;
    }
    return c;
}

Circuit Circuit::inverse() const {
    Circuit inv(n_qubits);
    inv.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        Gate g = *it;
        g.angle = -g.angle;
        inv.gates.push_back(g);
    }
    return inv;
}

DenseState::DenseState(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxDenseQubits) {
        throw DimensionError("DenseState: register size " +
                             std::to_string(n_qubits) + " outside [1, " +
                             std::to_string(kMaxDenseQubits) + "]");
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

DenseState::DenseState(int n_qubits, std::vector<cplx> amplitudes)
    : DenseState(n_qubits) {
    if (amplitudes.size() != amps_.size()) {
        throw DimensionError("DenseState: expected 2^n amplitudes");
    }
    amps_ = std::move(amplitudes);
    if (std::abs(norm() - 1.0) > kNormTolerance) {
        throw DomainError("DenseState: amplitudes have norm " + std::to_string(norm()));
    }
}

DenseState DenseState::basis(int n_qubits, std::uint64_t index) {
    DenseState s(n_qubits);
    if (index >= s.amps_.size()) {
        throw DimensionError("DenseState::basis: index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double DenseState::norm() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

UnaryState::UnaryState(std::vector<double> amplitudes)
    : UnaryState(unchecked(std::move(amplitudes))) {
    if (std::abs(norm() - 1.0) > kNormTolerance) {
        throw DomainError("UnaryState: amplitudes have norm " + std::to_string(norm()));
    }
}

UnaryState UnaryState::unchecked(std::vector<double> amplitudes) {
    if (amplitudes.empty()) {
        throw DimensionError("UnaryState: empty amplitude vector");
    }
    UnaryState s;
    s.amps_ = std::move(amplitudes);
    return s;
}

UnaryState UnaryState::basis(int n, int k) {
    check_qubit(k, n, "UnaryState::basis");
    std::vector<double> a(static_cast<std::size_t>(n), 0.0);
    a[static_cast<std::size_t>(k)] = 1.0;
    return UnaryState(std::move(a));
}

double UnaryState::norm() const { return norm2(amps_); }

std::uint64_t unary_index(int n_qubits, int qubit) {
    check_qubit(qubit, n_qubits, "unary_index");
    return qubit_mask(n_qubits, qubit);
}

Matrix rbs_matrix(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return Matrix{{1, 0, 0, 0}, {0, c, s, 0}, {0, -s, c, 0}, {0, 0, 0, 1}};
}

void apply_gate(DenseState &state, const Gate &gate) {
    const int n = state.n_qubits();
    validate_gate(gate, n);
    auto amps = state.amplitudes();
    const std::uint64_t dim = amps.size();
    const std::uint64_t m1 = qubit_mask(n, gate.q1);

    switch (gate.kind) {
    case GateKind::X:
        for (std::uint64_t i = 0; i < dim; ++i) {
            if ((i & m1) == 0) {
                std::swap(amps[i], amps[i | m1]);
            }
        }
        break;
    case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        for (std::uint64_t i = 0; i < dim; ++i) {
            if ((i & m1) == 0) {
                const cplx a0 = amps[i];
                const cplx a1 = amps[i | m1];
                amps[i] = r * (a0 + a1);
                amps[i | m1] = r * (a0 - a1);
            }
        }
        break;
    }
    case GateKind::Ry: {
        const double c = std::cos(gate.angle / 2);
        const double s = std::sin(gate.angle / 2);
        for (std::uint64_t i = 0; i < dim; ++i) {
            if ((i & m1) == 0) {
                const cplx a0 = amps[i];
                const cplx a1 = amps[i | m1];
                amps[i] = c * a0 - s * a1;
                amps[i | m1] = s * a0 + c * a1;
            }
        }
        break;
    }
    case GateKind::CZ: {
        const std::uint64_t both = m1 | qubit_mask(n, gate.q2);
        for (std::uint64_t i = 0; i < dim; ++i) {
            if ((i & both) == both) {
                amps[i] = -amps[i];
            }
        }
        break;
    }
    case GateKind::RBS: {
        const std::uint64_t m2 = qubit_mask(n, gate.q2);
        const double c = std::cos(gate.angle);
        const double s = std::sin(gate.angle);
        for (std::uint64_t i = 0; i < dim; ++i) {
            if ((i & (m1 | m2)) == 0) {
                // |01> has q2 set, |10> has q1 set
                const cplx a01 = amps[i | m2];
                const cplx a10 = amps[i | m1];
                amps[i | m2] = c * a01 + s * a10;
                amps[i | m1] = -s * a01 + c * a10;
            }
        }
        break;
    }
    }
}

DenseState apply_gate_dense(DenseState state, const Gate &gate) {
    apply_gate(state, gate);
    return state;
}

DenseState simulate_dense(const Circuit &c) {
    return simulate_dense(c, DenseState(c.n_qubits));
}

DenseState simulate_dense(const Circuit &c, DenseState initial) {
    if (initial.n_qubits() != c.n_qubits) {
        throw DimensionError("simulate_dense: register size mismatch");
    }
    for (const auto &g : c.gates) {
        apply_gate(initial, g);
    }
    return initial;
}

std::vector<cplx> circuit_unitary(const Circuit &c) {
    const std::uint64_t dim = std::uint64_t{1} << c.n_qubits;
    std::vector<cplx> u(dim * dim);
    for (std::uint64_t col = 0; col < dim; ++col) {
        const DenseState out = simulate_dense(c, DenseState::basis(c.n_qubits, col));
        for (std::uint64_t row = 0; row < dim; ++row) {
            u[row * dim + col] = out.amplitude(row);
        }
    }
    return u;
}

void apply_rbs(UnaryState &state, int q1, int q2, double angle) {
    const int n = state.n_qubits();
    check_qubit(q1, n, "apply_rbs");
    check_qubit(q2, n, "apply_rbs");
    if (q1 == q2) {
        throw DomainError("apply_rbs: qubits must be distinct");
    }
    auto a = state.amplitudes();
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double a1 = a[static_cast<std::size_t>(q1)];
    const double a2 = a[static_cast<std::size_t>(q2)];
    a[static_cast<std::size_t>(q1)] = c * a1 - s * a2;
    a[static_cast<std::size_t>(q2)] = s * a1 + c * a2;
}

UnaryState apply_rbs_unary(UnaryState state, int q1, int q2, double angle) {
    apply_rbs(state, q1, q2, angle);
    return state;
}

UnaryState simulate_unary(const Circuit &c, UnaryState initial) {
    if (initial.n_qubits() != c.n_qubits) {
        throw DimensionError("simulate_unary: register size mismatch");
    }
    for (const auto &g : c.gates) {
        if (g.kind != GateKind::RBS) {
            throw DomainError(std::string("simulate_unary: gate ") +
                              gate_name(g.kind) +
                              " leaves the weight-1 subspace");
        }
        apply_rbs(initial, g.q1, g.q2, g.angle);
    }
    return initial;
}

DenseState to_dense(const UnaryState &u) {
    const int n = u.n_qubits();
    DenseState s(n);
    auto amps = s.amplitudes();
    amps[0] = 0.0;
    for (int q = 0; q < n; ++q) {
        amps[qubit_mask(n, q)] = u[static_cast<std::size_t>(q)];
    }
    return s;
}

UnaryState unary_part(const DenseState &s) {
    const int n = s.n_qubits();
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        a[static_cast<std::size_t>(q)] = s.amplitude(qubit_mask(n, q)).real();
    }
    return UnaryState::unchecked(std::move(a));
}

double out_of_subspace_mass(const DenseState &s) {
    double m = 0.0;
    const auto amps = s.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        if (std::popcount(i) != 1) {
            m += std::norm(amps[i]);
        }
    }
    return m;
}

double unary_imag_max(const DenseState &s) {
    const int n = s.n_qubits();
    double m = 0.0;
    for (int q = 0; q < n; ++q) {
        m = std::max(m, std::abs(s.amplitude(qubit_mask(n, q)).imag()));
    }
    return m;
}

std::vector<Gate> rbs_decomposition(int q1, int q2, double angle) {
    if (q1 == q2) {
        throw DomainError("rbs_decomposition: qubits must be distinct");
    }
    return {Gate::h(q1),         Gate::h(q2),          Gate::cz(q1, q2),
            Gate::ry(q1, angle), Gate::ry(q2, -angle), Gate::cz(q1, q2),
            Gate::h(q1),         Gate::h(q2)};
}

double prob_one(const DenseState &s, int qubit) {
    const int n = s.n_qubits();
    check_qubit(qubit, n, "prob_one");
    const std::uint64_t m = qubit_mask(n, qubit);
    double p = 0.0;
    const auto amps = s.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        if (i & m) {
            p += std::norm(amps[i]);
        }
    }
    return p;
}

double prob_one(const UnaryState &s, int qubit) {
    check_qubit(qubit, s.n_qubits(), "prob_one");
    const double a = s[static_cast<std::size_t>(qubit)];
    return a * a;
}

std::string to_text(const Circuit &c) {
    std::ostringstream out;
    out << "QUBITS " << c.n_qubits << '\n';
    char buf[64];
    for (const auto &g : c.gates) {
        out << gate_name(g.kind) << ' ' << g.q1;
        if (g.is_two_qubit()) {
            out << ' ' << g.q2;
        }
        if (g.kind == GateKind::Ry || g.kind == GateKind::RBS) {
            std::snprintf(buf, sizeof buf, " %.17g", g.angle);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

Circuit parse_circuit(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    Circuit c;
    bool have_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op) || op[0] == '#') {
            continue;
        }
        auto fail = [&](const std::string &why) {
            return FormatError("circuit text line " + std::to_string(line_no) +
                               ": " + why);
        };
        if (!have_header) {
            int n = 0;
            if (op != "QUBITS" || !(ls >> n)) {
                throw fail("expected 'QUBITS <n>' header");
            }
            c = Circuit(n);
            have_header = true;
            continue;
        }
        Gate g{GateKind::X, -1};
        if (op == "X" || op == "H") {
            g.kind = op == "X" ? GateKind::X : GateKind::H;
            if (!(ls >> g.q1)) throw fail("missing qubit");
        } else if (op == "CZ") {
            g.kind = GateKind::CZ;
            if (!(ls >> g.q1 >> g.q2)) throw fail("missing qubits");
        } else if (op == "RY") {
            g.kind = GateKind::Ry;
            if (!(ls >> g.q1 >> g.angle)) throw fail("missing qubit or angle");
        } else if (op == "RBS") {
            g.kind = GateKind::RBS;
            if (!(ls >> g.q1 >> g.q2 >> g.angle)) {
                throw fail("missing qubits or angle");
            }
        } else {
            throw fail("unknown gate '" + op + "'");
        }
        c.append(g);
    }
    if (!have_header) {
        throw FormatError("circuit text: missing 'QUBITS <n>' header");
    }
    return c;
}

} // namespace qvit::qsim
