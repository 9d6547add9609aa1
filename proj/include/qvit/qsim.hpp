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
/**
 * @file
 * Exact simulation of RBS-gate circuits.
 *
 * Two backends share one gate model:
 *  - DenseState: the full 2^n complex statevector, used as the reference.
 *  - UnaryState: n real amplitudes on the Hamming-weight-1 subspace, on which
 *    an RBS gate is a plane (Givens) rotation.
 *
 * Basis ordering: qubit 0 is the leftmost ket symbol and the most significant
 * bit of a basis index, so UnaryState entry i is the coefficient of the basis
 * state with only qubit i set (entry 0 <-> |10...0>).
 *
 * Sign convention, checked against the dense composition of the
 * H-CZ-Ry-CZ-H decomposition: on a qubit pair (q1, q2),
 *
 *     RBS(t) |01> = cos t |01> - sin t |10>
 *     RBS(t) |10> = sin t |01> + cos t |10>
 *
 * so on the unary amplitudes a[q1] <- cos t a[q1] - sin t a[q2] and
 * a[q2] <- sin t a[q1] + cos t a[q2]. Loading e_0 through RBS(t) on (0, 1)
 * therefore gives (cos t, +sin t).
 */
#pragma once

#include "qvit/linalg.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qvit::qsim {

/// Largest register the dense reference backend accepts.
inline constexpr int kMaxDenseQubits = 14;
/// States built from explicit amplitudes must have unit norm to this tolerance.
inline constexpr double kNormTolerance = 1e-12;

enum class GateKind { X, H, CZ, Ry, RBS };

struct Gate {
    GateKind kind;
    int q1;
    int q2 = -1;       ///< second qubit for CZ and RBS, -1 otherwise
    double angle = 0.0; ///< radians, Ry and RBS only

    static Gate x(int q) { return {GateKind::X, q}; }
    static Gate h(int q) { return {GateKind::H, q}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, a, b}; }
    /// Standard Ry(angle) = exp(-i angle Y / 2).
    static Gate ry(int q, double angle) { return {GateKind::Ry, q, -1, angle}; }
    static Gate rbs(int a, int b, double angle) {
        return {GateKind::RBS, a, b, angle};
    }

    [[nodiscard]] bool is_two_qubit() const noexcept {
        return kind == GateKind::CZ || kind == GateKind::RBS;
    }

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// Throws DimensionError / DomainError when the gate is invalid on n qubits.
void validate_gate(const Gate &gate, int n_qubits);

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    Circuit() = default;
    explicit Circuit(int n);

    Circuit &append(const Gate &g);
    Circuit &append(const Circuit &other);

    void validate() const;
    [[nodiscard]] std::size_t count(GateKind kind) const;
    /// Gates in reverse order with rotation angles negated.
    [[nodiscard]] Circuit inverse() const;
};

class DenseState {
  public:
    /// |0...0> on n qubits.
    explicit DenseState(int n_qubits);
    /// Throws DomainError unless the amplitudes have unit norm.
    DenseState(int n_qubits, std::vector<std::complex<double>> amplitudes);

    static DenseState basis(int n_qubits, std::uint64_t index);

    [[nodiscard]] int n_qubits() const noexcept { return n_; }
    [[nodiscard]] std::span<const std::complex<double>> amplitudes() const noexcept {
        return amps_;
    }
    std::span<std::complex<double>> amplitudes() noexcept { return amps_; }
    [[nodiscard]] std::complex<double> amplitude(std::uint64_t index) const {
        return amps_.at(index);
    }
    [[nodiscard]] double norm() const;

  private:
    int n_;
    std::vector<std::complex<double>> amps_;
};

class UnaryState {
  public:
    UnaryState() = default;
    /// Throws DomainError unless the amplitudes have unit norm.
    explicit UnaryState(std::vector<double> amplitudes);
    /// No norm check; for partial extractions.
    static UnaryState unchecked(std::vector<double> amplitudes);

    /// e_k: only qubit k excited.
    static UnaryState basis(int n, int k);

    [[nodiscard]] int n_qubits() const noexcept {
        return static_cast<int>(amps_.size());
    }
    [[nodiscard]] std::span<const double> amplitudes() const noexcept {
        return amps_;
    }
    std::span<double> amplitudes() noexcept { return amps_; }
    double operator[](std::size_t i) const noexcept { return amps_[i]; }
    [[nodiscard]] double norm() const;

  private:
    std::vector<double> amps_;
};

/// Basis index of the state with only `qubit` set.
[[nodiscard]] std::uint64_t unary_index(int n_qubits, int qubit);

/// The 4x4 RBS matrix in the pair basis (|00>, |01>, |10>, |11>).
[[nodiscard]] Matrix rbs_matrix(double angle);

/// Dense 2^n x 2^n unitary of a gate sequence (reference only, small n).
[[nodiscard]] std::vector<std::complex<double>> circuit_unitary(const Circuit &c);

void apply_gate(DenseState &state, const Gate &gate);
[[nodiscard]] DenseState apply_gate_dense(DenseState state, const Gate &gate);
[[nodiscard]] DenseState simulate_dense(const Circuit &c);
[[nodiscard]] DenseState simulate_dense(const Circuit &c, DenseState initial);

/// Givens rotation on unary amplitudes (q1, q2); see file comment for signs.
void apply_rbs(UnaryState &state, int q1, int q2, double angle);
[[nodiscard]] UnaryState apply_rbs_unary(UnaryState state, int q1, int q2,
                                         double angle);

/// Runs an RBS-only circuit on the unary fast path.
[[nodiscard]] UnaryState simulate_unary(const Circuit &c, UnaryState initial);

/// Embeds unary amplitudes into a dense register.
[[nodiscard]] DenseState to_dense(const UnaryState &u);

/// Real parts of the weight-1 amplitudes.
[[nodiscard]] UnaryState unary_part(const DenseState &s);

/// Squared norm outside the Hamming-weight-1 subspace.
[[nodiscard]] double out_of_subspace_mass(const DenseState &s);

/// Largest |imag| over the weight-1 amplitudes.
[[nodiscard]] double unary_imag_max(const DenseState &s);

/// H(q1) H(q2) CZ Ry(q1, +t) Ry(q2, -t) CZ H(q1) H(q2). With the standard
/// half-angle Ry this composes to rbs_matrix(t) exactly (global phase 1).
[[nodiscard]] std::vector<Gate> rbs_decomposition(int q1, int q2, double angle);

/// Probability of measuring `qubit` in |1>.
[[nodiscard]] double prob_one(const DenseState &s, int qubit);
[[nodiscard]] double prob_one(const UnaryState &s, int qubit);

/// One gate per line: `X q`, `H q`, `CZ a b`, `RY q t`, `RBS a b t`, with a
/// leading `QUBITS n` line. Angles use 17 significant digits.
[[nodiscard]] std::string to_text(const Circuit &c);
[[nodiscard]] Circuit parse_circuit(const std::string &text);

} // namespace qvit::qsim
