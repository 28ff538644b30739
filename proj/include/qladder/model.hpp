// Copyright 2026 The qladder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qladder/errors.hpp"

namespace qladder {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Unit helpers. Everything inside the library is an angular rate in rad/s;
// only the CLI and these helpers speak MHz/GHz/ns.
inline double mhz(double f) { return kTwoPi * f * 1e6; }
inline double ghz(double f) { return kTwoPi * f * 1e9; }
inline double to_mhz(double w) { return w / (kTwoPi * 1e6); }
inline double to_ghz(double w) { return w / (kTwoPi * 1e9); }
inline double ns(double t) { return t * 1e-9; }
inline double us(double t) { return t * 1e-6; }

/// Physical parameters of one transmon qudit. Frequencies are angular
/// (rad/s); the transmon convention is anharmonicity > 0 with
/// ω_{k,k+1} = ω01 − k·α. E_C / E_J are optional linear-frequency (Hz)
/// design values; when both are set, E_J/E_C must exceed 50 (Duffing regime).
struct QuditParams {
    int dim = 2;
    double freq01 = 0.0;
    double anharmonicity = 0.0;
    std::optional<double> charging_energy;
    std::optional<double> josephson_energy;

    void validate() const {
        if (dim < 2 || dim > 6) {
            throw InvalidDimensionError("QuditParams: dim must lie in [2, 6], got " +
                                        std::to_string(dim));
        }
        if (!(anharmonicity > 0.0)) {
            throw Error("QuditParams: anharmonicity must be > 0 (transmon convention)");
        }
        if (charging_energy && josephson_energy && !(*josephson_energy / *charging_energy > 50.0)) {
            throw OutOfRegimeError("QuditParams: E_J/E_C must exceed 50");
        }
    }

    // ω_{k,k+1} = ω01 − k α
    double transition_freq(int k) const { return freq01 - static_cast<double>(k) * anharmonicity; }
};

/// Static coupling between two qudits in a chain, with optional resonator
/// bus parameters for deriving the effective rate.
struct CouplingSpec {
    int qudit_a = 0;
    int qudit_b = 1;
    double g01 = 0.0;
    std::optional<double> resonator_freq;
    std::optional<double> g_ar;
    std::optional<double> g_br;

    void validate() const {
        if (!(g01 > 0.0)) throw Error("CouplingSpec: g01 must be > 0");
        if (qudit_a == qudit_b) throw Error("CouplingSpec: coupling a qudit to itself");
    }
};

/// One microwave tone. `amp` is the resonant Rabi rate in the addressed
/// subspace (rad/s). The envelope is a raised-cosine ramp from 0 to amp over
/// ramp_time, flat during hold_time, then the mirror-image ramp down.
struct DriveTone {
    int target = 0;
    double freq = 0.0;
    double amp = 0.0;
    double phase = 0.0;
    double ramp_time = 0.0;
    double hold_time = 0.0;

    void validate() const {
        if (amp < 0.0) throw Error("DriveTone: amp must be >= 0");
        if (ramp_time < 0.0) throw Error("DriveTone: ramp_time must be >= 0");
    }

    double total_time() const { return 2.0 * ramp_time + hold_time; }

    // Envelope multiplier in [0, 1] at time t (relative to tone start).
    double envelope(double t) const {
        if (t <= 0.0 || t >= total_time()) return 0.0;
        if (ramp_time > 0.0 && t < ramp_time) {
            return 0.5 * (1.0 - std::cos(M_PI * t / ramp_time));
        }
        if (ramp_time > 0.0 && t > ramp_time + hold_time) {
            const double s = total_time() - t;
            return 0.5 * (1.0 - std::cos(M_PI * s / ramp_time));
        }
        return 1.0;
    }
};

inline std::int64_t total_dim(const std::vector<int>& dims) {
    std::int64_t n = 1;
    for (int d : dims) n *= d;
    return n;
}

// Joint basis index for per-site digits, little-endian: qudit 0 varies
// fastest. Ditstrings print as |q_{n-1} ... q_1 q_0>.
inline std::int64_t ditstring_index(const std::vector<int>& digits, const std::vector<int>& dims) {
    std::int64_t idx = 0;
    for (std::size_t s = dims.size(); s-- > 0;) {
        idx = idx * dims[s] + digits[s];
    }
    return idx;
}

inline std::vector<int> index_to_digits(std::int64_t index, const std::vector<int>& dims) {
    std::vector<int> digits(dims.size());
    for (std::size_t s = 0; s < dims.size(); ++s) {
        digits[s] = static_cast<int>(index % dims[s]);
        index /= dims[s];
    }
    return digits;
}

inline std::string ditstring_label(std::int64_t index, const std::vector<int>& dims) {
    const auto digits = index_to_digits(index, dims);
    std::string s;
    for (std::size_t i = digits.size(); i-- > 0;) s += std::to_string(digits[i]);
    return s;
}

/// Pure state vector or density matrix over a tensor product of qudits.
struct QuantumState {
    std::vector<int> dims;
    bool is_density = false;
    VectorXcd vec;
    MatrixXcd mat;

    static QuantumState pure(std::vector<int> dims, VectorXcd amplitudes) {
        QuantumState st;
        st.dims = std::move(dims);
        st.vec = std::move(amplitudes);
        if (st.vec.size() != total_dim(st.dims)) {
            throw ShapeMismatchError("QuantumState: amplitude length does not match dims");
        }
        return st;
    }

    static QuantumState basis(const std::vector<int>& dims, const std::vector<int>& digits) {
        VectorXcd v = VectorXcd::Zero(total_dim(dims));
        v(ditstring_index(digits, dims)) = 1.0;
        return pure(dims, std::move(v));
    }

    static QuantumState density(std::vector<int> dims, MatrixXcd rho) {
        QuantumState st;
        st.dims = std::move(dims);
        st.is_density = true;
        st.mat = std::move(rho);
        if (st.mat.rows() != total_dim(st.dims) || st.mat.cols() != st.mat.rows()) {
            throw ShapeMismatchError("QuantumState: density shape does not match dims");
        }
        return st;
    }

    std::int64_t dim() const { return total_dim(dims); }

    MatrixXcd density_matrix() const {
        if (is_density) return mat;
        return vec * vec.adjoint();
    }

    double population(std::int64_t index) const {
        return is_density ? mat(index, index).real() : std::norm(vec(index));
    }

    // Pure states:  Σ|c|² = 1 within 1e-10.
    // Density:      Hermitian and unit trace within 1e-10, eigenvalues >= -1e-8.
    void validate() const {
        if (!is_density) {
            if (std::abs(vec.squaredNorm() - 1.0) > 1e-10) {
                throw NonPhysicalStateError("QuantumState: pure state not normalized");
            }
            return;
        }
        if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
            throw NonPhysicalStateError("QuantumState: density matrix not Hermitian");
        }
        if (std::abs(mat.trace().real() - 1.0) > 1e-10 || std::abs(mat.trace().imag()) > 1e-10) {
            throw NonPhysicalStateError("QuantumState: density matrix trace != 1");
        }
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-8) {
            throw NonPhysicalStateError("QuantumState: density matrix has negative eigenvalues");
        }
    }

    // Fix the global phase so the largest-magnitude amplitude is real and
    // positive (lowest index wins ties). Tests compare states in this form.
    QuantumState canonical() const {
        if (is_density) return *this;
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < vec.size(); ++i) {
            const double a = std::abs(vec(i));
            if (a > best + 1e-15) {
                best = a;
                imax = i;
            }
        }
        QuantumState out = *this;
        if (best > 0.0) out.vec *= std::conj(vec(imax)) / std::abs(vec(imax));
        return out;
    }
};

enum class GateKind {
    SubspaceX,
    VirtualZ,
    TwoPhotonSwap,
    SubspaceSwap,
    CrossKerr,
    PhaseCorrection,
};

inline std::string gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::SubspaceX: return "SubspaceX";
        case GateKind::VirtualZ: return "VirtualZ";
        case GateKind::TwoPhotonSwap: return "TwoPhotonSwap";
        case GateKind::SubspaceSwap: return "SubspaceSwap";
        case GateKind::CrossKerr: return "CrossKerr";
        case GateKind::PhaseCorrection: return "PhaseCorrection";
    }
    return "?";
}

inline GateKind gate_kind_from_name(const std::string& s) {
    if (s == "SubspaceX") return GateKind::SubspaceX;
    if (s == "VirtualZ") return GateKind::VirtualZ;
    if (s == "TwoPhotonSwap") return GateKind::TwoPhotonSwap;
    if (s == "SubspaceSwap") return GateKind::SubspaceSwap;
    if (s == "CrossKerr") return GateKind::CrossKerr;
    if (s == "PhaseCorrection") return GateKind::PhaseCorrection;
    throw Error("unknown gate kind: " + s);
}

/// Symbolic circuit element. `subspace` holds the level index k (1-qudit
/// kinds) or the pair (k, l) (2-qudit kinds); `angle` is the rotation angle
/// and `phase` the rotation-axis phase where applicable. PhaseCorrection
/// multiplies the listed basis state |k> (or |k,l>) by e^{i angle}.
struct GateOp {
    GateKind kind = GateKind::SubspaceX;
    std::vector<int> targets;
    std::vector<int> subspace;
    double angle = 0.0;
    double phase = 0.0;

    bool two_qudit() const {
        return kind == GateKind::TwoPhotonSwap || kind == GateKind::SubspaceSwap ||
               kind == GateKind::CrossKerr ||
               (kind == GateKind::PhaseCorrection && targets.size() == 2);
    }

    void validate(const std::vector<int>& dims) const {
        const bool two = kind == GateKind::TwoPhotonSwap || kind == GateKind::SubspaceSwap ||
                         kind == GateKind::CrossKerr;
        if (two && targets.size() != 2) {
            throw Error(gate_kind_name(kind) + ": exactly 2 targets required");
        }
        if (!two && kind != GateKind::PhaseCorrection && targets.size() != 1) {
            throw Error(gate_kind_name(kind) + ": exactly 1 target required");
        }
        if (kind == GateKind::PhaseCorrection &&
            (targets.empty() || targets.size() > 2 || targets.size() != subspace.size())) {
            throw Error("PhaseCorrection: 1 or 2 targets with matching level list");
        }
        for (int t : targets) {
            if (t < 0 || t >= static_cast<int>(dims.size())) {
                throw Error(gate_kind_name(kind) + ": target index out of range");
            }
        }
        switch (kind) {
            case GateKind::SubspaceX:
            case GateKind::VirtualZ: {
                if (subspace.size() != 1) throw Error("expected one subspace index");
                const int k = subspace[0];
                if (k < 0 || k + 1 >= dims[targets[0]]) {
                    throw Error(gate_kind_name(kind) + ": subspace index out of range");
                }
                break;
            }
            case GateKind::TwoPhotonSwap:
            case GateKind::SubspaceSwap: {
                if (subspace.size() != 2) throw Error("expected subspace pair (k, l)");
                if (subspace[0] < 0 || subspace[0] + 1 >= dims[targets[0]] || subspace[1] < 0 ||
                    subspace[1] + 1 >= dims[targets[1]]) {
                    throw Error(gate_kind_name(kind) + ": subspace pair out of range");
                }
                break;
            }
            case GateKind::CrossKerr: {
                // Fixed-form gate: -1 on |1>_a ⊗ |2>_b.
                if (dims[targets[0]] < 2 || dims[targets[1]] < 3) {
                    throw Error("CrossKerr: needs target dim >= 2 and control dim >= 3");
                }
                break;
            }
            case GateKind::PhaseCorrection: {
                for (std::size_t i = 0; i < targets.size(); ++i) {
                    if (subspace[i] < 0 || subspace[i] >= dims[targets[i]]) {
                        throw Error("PhaseCorrection: level out of range");
                    }
                }
                break;
            }
        }
    }
};

/// Dressed-frame mixing angles for a driven pair; cos θ = Δ/√(Δ²+Ω²) holds
/// by construction.
struct DressedAngles {
    double theta_1 = 0.0;
    double theta_2 = 0.0;
    double delta_1 = 0.0;
    double delta_2 = 0.0;
    double omega_1 = 0.0;
    double omega_2 = 0.0;
};

/// Interaction rates of the dressed-frame coupling; omega_2p = 4√(J_I²+J_Q²).
struct InteractionRates {
    double j_i = 0.0;
    double j_q = 0.0;
    double j_zz = 0.0;
    double omega_2p = 0.0;
};

/// Annihilation operator: <k-1|a|k> = sqrt(k).
inline MatrixXcd annihilation_operator(int dim) {
    if (dim < 2) throw InvalidDimensionError("annihilation_operator: dim must be >= 2");
    MatrixXcd a = MatrixXcd::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline MatrixXcd number_operator(int dim) {
    MatrixXcd n = MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

/// Tensor-embed a single-site operator at `target`, identities elsewhere.
/// Site ordering is little-endian (qudit 0 varies fastest).
inline MatrixXcd embed_operator(const MatrixXcd& op, int target, const std::vector<int>& dims) {
    if (target < 0 || target >= static_cast<int>(dims.size())) {
        throw ShapeMismatchError("embed_operator: target out of range");
    }
    if (op.rows() != op.cols() || op.rows() != dims[target]) {
        throw ShapeMismatchError("embed_operator: operator shape does not match dims[target]");
    }
    std::int64_t lower = 1, upper = 1;
    for (int s = 0; s < target; ++s) lower *= dims[s];
    for (int s = target + 1; s < static_cast<int>(dims.size()); ++s) upper *= dims[s];
    const std::int64_t d = dims[target];
    const std::int64_t n = lower * d * upper;
    MatrixXcd out = MatrixXcd::Zero(n, n);
    for (std::int64_t u = 0; u < upper; ++u) {
        for (std::int64_t r = 0; r < d; ++r) {
            for (std::int64_t c = 0; c < d; ++c) {
                const Complex v = op(r, c);
                if (v == Complex(0.0, 0.0)) continue;
                const std::int64_t row0 = (u * d + r) * lower;
                const std::int64_t col0 = (u * d + c) * lower;
                for (std::int64_t l = 0; l < lower; ++l) out(row0 + l, col0 + l) = v;
            }
        }
    }
    return out;
}

/// Embed a two-site operator acting on (site_a, site_b); `op` is indexed as
/// (ia + d_a * ib) against the joint little-endian ordering.
inline MatrixXcd embed_two_site(const MatrixXcd& op, int site_a, int site_b,
                                const std::vector<int>& dims) {
    if (site_a == site_b) throw ShapeMismatchError("embed_two_site: sites must differ");
    const int n_sites = static_cast<int>(dims.size());
    if (site_a < 0 || site_b < 0 || site_a >= n_sites || site_b >= n_sites) {
        throw ShapeMismatchError("embed_two_site: site out of range");
    }
    const std::int64_t da = dims[site_a], db = dims[site_b];
    if (op.rows() != da * db || op.cols() != da * db) {
        throw ShapeMismatchError("embed_two_site: operator shape mismatch");
    }
    const std::int64_t n = total_dim(dims);
    MatrixXcd out = MatrixXcd::Zero(n, n);
    std::vector<int> digits(dims.size());
    for (std::int64_t col = 0; col < n; ++col) {
        auto dg = index_to_digits(col, dims);
        const std::int64_t pair_col = dg[site_a] + da * dg[site_b];
        for (std::int64_t ia = 0; ia < da; ++ia) {
            for (std::int64_t ib = 0; ib < db; ++ib) {
                const Complex v = op(ia + da * ib, pair_col);
                if (v == Complex(0.0, 0.0)) continue;
                auto dg_row = dg;
                dg_row[site_a] = static_cast<int>(ia);
                dg_row[site_b] = static_cast<int>(ib);
                out(ditstring_index(dg_row, dims), col) = v;
            }
        }
    }
    return out;
}

}  // namespace qladder
