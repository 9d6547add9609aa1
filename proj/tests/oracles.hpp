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
 * Reference implementations used only by the tests. None of them call into
 * the library code they are compared against.
 */
#pragma once

#include "qvit/linalg.hpp"
#include "qvit/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = std::vector<std::vector<cplx>>;

/// Small deterministic generator for property tests.
struct Gen {
    std::mt19937_64 eng;
    explicit Gen(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(eng); }
    std::vector<double> vec(std::size_t n, double sd = 1.0) {
        std::vector<double> v(n);
        for (auto &x : v) {
            x = normal(sd);
        }
        return v;
    }
    std::vector<double> unit(std::size_t n) {
        auto v = vec(n);
        double s = 0.0;
        for (double x : v) {
            s += x * x;
        }
        s = std::sqrt(s);
        for (auto &x : v) {
            x /= s;
        }
        return v;
    }
    qvit::Matrix matrix(std::size_t r, std::size_t c, double sd = 1.0) {
        qvit::Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                m(i, j) = normal(sd);
            }
        }
        return m;
    }
};

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(qvit::Matrix a) {
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a(r, c)) > std::abs(a(p, c))) {
                p = r;
            }
        }
        if (a(p, c) == 0.0) {
            return 0.0;
        }
        if (p != c) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a(p, k), a(c, k));
            }
            det = -det;
        }
        det *= a(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            for (std::size_t k = c; k < n; ++k) {
                a(r, k) -= f * a(c, k);
            }
        }
    }
    return det;
}

/// Random element of SO(n): Gram-Schmidt on a Gaussian matrix (two passes),
/// last row negated when the determinant comes out negative.
inline qvit::Matrix special_orthogonal(Gen &g, int n) {
    const auto un = static_cast<std::size_t>(n);
    qvit::Matrix q = g.matrix(un, un);
    for (std::size_t r = 0; r < un; ++r) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < r; ++k) {
                double d = 0.0;
                for (std::size_t c = 0; c < un; ++c) {
                    d += q(r, c) * q(k, c);
                }
                for (std::size_t c = 0; c < un; ++c) {
                    q(r, c) -= d * q(k, c);
                }
            }
        }
        double len = 0.0;
        for (std::size_t c = 0; c < un; ++c) {
            len += q(r, c) * q(r, c);
        }
        len = std::sqrt(len);
        for (std::size_t c = 0; c < un; ++c) {
            q(r, c) /= len;
        }
    }
    if (oracle::determinant(q) < 0) {
        for (std::size_t c = 0; c < un; ++c) {
            q(un - 1, c) = -q(un - 1, c);
        }
    }
    return q;
}

/// Largest |(m mᵀ - I)_ij|.
inline double orthogonality_defect(const qvit::Matrix &m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.rows(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < m.cols(); ++k) {
                d += m(i, k) * m(j, k);
            }
            worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

/// 2x2 single-qubit and 4x4 two-qubit matrices written out by hand.
inline CMatrix single_qubit_matrix(const qvit::qsim::Gate &g) {
    using qvit::qsim::GateKind;
    const double r = 1.0 / std::sqrt(2.0);
    switch (g.kind) {
    case GateKind::X: return {{0, 1}, {1, 0}};
    case GateKind::H: return {{r, r}, {r, -r}};
    case GateKind::Ry: {
        const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
        return {{c, -s}, {s, c}};
    }
    default: return {};
    }
}

inline CMatrix two_qubit_matrix(const qvit::qsim::Gate &g) {
    using qvit::qsim::GateKind;
    if (g.kind == GateKind::CZ) {
        return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    }
    const double c = std::cos(g.angle), s = std::sin(g.angle);
    return {{1, 0, 0, 0}, {0, c, s, 0}, {0, -s, c, 0}, {0, 0, 0, 1}};
}

/// Bit of qubit q in basis index k; qubit 0 is the most significant bit.
inline int bit(std::uint64_t k, int q, int n) { return static_cast<int>((k >> (n - 1 - q)) & 1U); }

/// Full 2^n x 2^n matrix of one gate, built entry by entry.
inline CMatrix embed_gate(const qvit::qsim::Gate &g, int n) {
    const std::uint64_t dim = 1ULL << n;
    CMatrix u(dim, std::vector<cplx>(dim, 0.0));
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
            bool others_equal = true;
            for (int q = 0; q < n; ++q) {
                if (q != g.q1 && q != g.q2 && bit(r, q, n) != bit(c, q, n)) {
                    others_equal = false;
                }
            }
            if (!others_equal) {
                continue;
            }
            if (g.is_two_qubit()) {
                const auto m = two_qubit_matrix(g);
                const int ri = 2 * bit(r, g.q1, n) + bit(r, g.q2, n);
                const int ci = 2 * bit(c, g.q1, n) + bit(c, g.q2, n);
                u[r][c] = m[ri][ci];
            } else {
                const auto m = single_qubit_matrix(g);
                u[r][c] = m[bit(r, g.q1, n)][bit(c, g.q1, n)];
            }
        }
    }
    return u;
}

inline std::vector<cplx> mat_vec(const CMatrix &u, const std::vector<cplx> &v) {
    std::vector<cplx> out(v.size(), 0.0);
    for (std::size_t r = 0; r < u.size(); ++r) {
        for (std::size_t c = 0; c < v.size(); ++c) {
            out[r] += u[r][c] * v[c];
        }
    }
    return out;
}

inline CMatrix mat_mul(const CMatrix &a, const CMatrix &b) {
    const std::size_t n = a.size();
    CMatrix out(n, std::vector<cplx>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return out;
}

/// Applies the circuit as a product of full gate matrices.
inline std::vector<cplx> run(const qvit::qsim::Circuit &c, std::vector<cplx> state) {
    for (const auto &g : c.gates) {
        state = mat_vec(embed_gate(g, c.n_qubits), state);
    }
    return state;
}

inline std::vector<cplx> zero_state(int n) {
    std::vector<cplx> s(1ULL << n, 0.0);
    s[0] = 1.0;
    return s;
}

/// Unary vector to a full statevector (entry i on qubit i excited).
inline std::vector<cplx> from_unary(const std::vector<double> &x) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> s(1ULL << n, 0.0);
    for (int i = 0; i < n; ++i) {
        s[1ULL << (n - 1 - i)] = x[static_cast<std::size_t>(i)];
    }
    return s;
}

inline std::vector<cplx> unary_amplitudes(const std::vector<cplx> &s, int n) {
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = s[1ULL << (n - 1 - i)];
    }
    return out;
}

/// Weight of basis states outside the one-excitation subspace.
inline double off_subspace(const std::vector<cplx> &s) {
    double m = 0.0;
    for (std::uint64_t k = 0; k < s.size(); ++k) {
        if (__builtin_popcountll(k) != 1) {
            m += std::norm(s[k]);
        }
    }
    return m;
}

/// Smallest max |a - e^{i phi} b| over phases, found from the largest entry of b.
inline double phase_distance(const CMatrix &a, const CMatrix &b) {
    std::size_t pr = 0, pc = 0;
    for (std::size_t r = 0; r < b.size(); ++r) {
        for (std::size_t c = 0; c < b.size(); ++c) {
            if (std::abs(b[r][c]) > std::abs(b[pr][pc])) {
                pr = r;
                pc = c;
            }
        }
    }
    cplx phase = a[pr][pc] / b[pr][pc];
    phase /= std::abs(phase);
    double worst = 0.0;
    for (std::size_t r = 0; r < b.size(); ++r) {
        for (std::size_t c = 0; c < b.size(); ++c) {
            worst = std::max(worst, std::abs(a[r][c] - phase * b[r][c]));
        }
    }
    return worst;
}

/// Product of explicit Givens rotations in the given order.
inline qvit::Matrix givens_product(int n, const std::vector<std::pair<int, int>> &pairs,
                                   const std::vector<double> &angles) {
    qvit::Matrix m = qvit::Matrix::identity(static_cast<std::size_t>(n));
    for (std::size_t g = 0; g < pairs.size(); ++g) {
        qvit::Matrix rot = qvit::Matrix::identity(static_cast<std::size_t>(n));
        const auto a = static_cast<std::size_t>(pairs[g].first);
        const auto b = static_cast<std::size_t>(pairs[g].second);
        const double c = std::cos(angles[g]), s = std::sin(angles[g]);
        rot(a, a) = c;
        rot(a, b) = -s;
        rot(b, a) = s;
        rot(b, b) = c;
        qvit::Matrix next(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < next.rows(); ++i) {
            for (std::size_t j = 0; j < next.cols(); ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < next.cols(); ++k) {
                    acc += rot(i, k) * m(k, j);
                }
                next(i, j) = acc;
            }
        }
        m = next;
    }
    return m;
}

/// AUC by comparing every positive with every negative.
inline double brute_force_auc(const std::vector<double> &s, const std::vector<int> &y) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / pairs;
}

/// Central difference of f at x[k].
inline double central_difference(const std::function<double()> &f, double &x, double h) {
    const double keep = x;
    x = keep + h;
    const double plus = f();
    x = keep - h;
    const double minus = f();
    x = keep;
    return (plus - minus) / (2 * h);
}

inline double rel_err(double a, double b, double floor = 1e-8) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace oracle
