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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qladder/errors.hpp"
#include "qladder/model.hpp"

namespace qladder {

struct Circuit {
    std::vector<int> dims;
    std::vector<GateOp> ops;

    void validate() const {
        for (const auto& op : ops) op.validate(dims);
    }

    int count_kind(GateKind k) const {
        int n = 0;
        for (const auto& op : ops) n += (op.kind == k) ? 1 : 0;
        return n;
    }

    Circuit inverse() const;
};

namespace detail {

// In-subspace rotation by angle about the axis cosβ·X + sinβ·Y:
//   R = cos(θ/2) I + i sin(θ/2) (cosβ X + sinβ Y)
// so θ=π, β=0 sends |a> -> i|b> (the two-photon phase convention).
inline Eigen::Matrix2cd axis_rotation(double angle, double beta) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd r;
    r(0, 0) = c;
    r(0, 1) = i * s * std::exp(Complex(0.0, -beta));
    r(1, 0) = i * s * std::exp(Complex(0.0, beta));
    r(1, 1) = c;
    return r;
}

inline MatrixXcd embed_pair_rotation(int dim, int a, int b, const Eigen::Matrix2cd& r) {
    MatrixXcd u = MatrixXcd::Identity(dim, dim);
    u(a, a) = r(0, 0);
    u(a, b) = r(0, 1);
    u(b, a) = r(1, 0);
    u(b, b) = r(1, 1);
    return u;
}

}  // namespace detail

/// Full joint-space unitary of one GateOp.
inline MatrixXcd gate_unitary(const GateOp& op, const std::vector<int>& dims) {
    op.validate(dims);
    const std::int64_t n = total_dim(dims);
    switch (op.kind) {
        case GateKind::SubspaceX: {
            const int t = op.targets[0];
            const int k = op.subspace[0];
            const auto u = detail::embed_pair_rotation(dims[t], k, k + 1,
                                                       detail::axis_rotation(op.angle, op.phase));
            return embed_operator(u, t, dims);
        }
        case GateKind::VirtualZ: {
            const int t = op.targets[0];
            const int k = op.subspace[0];
            MatrixXcd u = MatrixXcd::Identity(dims[t], dims[t]);
            const Complex ph = std::exp(Complex(0.0, op.angle));
            for (int l = k + 1; l < dims[t]; ++l) u(l, l) = ph;
            return embed_operator(u, t, dims);
        }
        case GateKind::TwoPhotonSwap:
        case GateKind::SubspaceSwap: {
            const int a = op.targets[0], b = op.targets[1];
            const int k = op.subspace[0], l = op.subspace[1];
            const std::int64_t da = dims[a], db = dims[b];
            // Pair-space indices (ia + da*ib). TwoPhotonSwap rotates
            // span{|k,l>, |k+1,l+1>}; SubspaceSwap rotates span{|k+1,l>, |k,l+1>}.
            std::int64_t i0, i1;
            if (op.kind == GateKind::TwoPhotonSwap) {
                i0 = k + da * l;
                i1 = (k + 1) + da * (l + 1);
            } else {
                i0 = (k + 1) + da * l;
                i1 = k + da * (l + 1);
            }
            MatrixXcd u = MatrixXcd::Identity(da * db, da * db);
            const auto r = detail::axis_rotation(op.angle, op.phase);
            u(i0, i0) = r(0, 0);
            u(i0, i1) = r(0, 1);
            u(i1, i0) = r(1, 0);
            u(i1, i1) = r(1, 1);
            return embed_two_site(u, a, b, dims);
        }
        case GateKind::CrossKerr: {
            const int a = op.targets[0], b = op.targets[1];
            const std::int64_t da = dims[a], db = dims[b];
            MatrixXcd u = MatrixXcd::Identity(da * db, da * db);
            u(1 + da * 2, 1 + da * 2) = -1.0;  // -1 on |1>_a ⊗ |2>_b
            return embed_two_site(u, a, b, dims);
        }
        case GateKind::PhaseCorrection: {
            const Complex ph = std::exp(Complex(0.0, op.angle));
            if (op.targets.size() == 1) {
                const int t = op.targets[0];
                MatrixXcd u = MatrixXcd::Identity(dims[t], dims[t]);
                u(op.subspace[0], op.subspace[0]) = ph;
                return embed_operator(u, t, dims);
            }
            const int a = op.targets[0], b = op.targets[1];
            const std::int64_t da = dims[a], db = dims[b];
            MatrixXcd u = MatrixXcd::Identity(da * db, da * db);
            const std::int64_t idx = op.subspace[0] + da * op.subspace[1];
            u(idx, idx) = ph;
            return embed_two_site(u, a, b, dims);
        }
    }
    return MatrixXcd::Identity(n, n);
}

inline GateOp inverse_op(const GateOp& op) {
    GateOp inv = op;
    switch (op.kind) {
        case GateKind::SubspaceX:
        case GateKind::TwoPhotonSwap:
        case GateKind::SubspaceSwap:
            inv.angle = -op.angle;
            break;
        case GateKind::VirtualZ:
        case GateKind::PhaseCorrection:
            inv.angle = -op.angle;
            break;
        case GateKind::CrossKerr:
            break;  // involution
    }
    return inv;
}

inline Circuit Circuit::inverse() const {
    Circuit inv;
    inv.dims = dims;
    inv.ops.reserve(ops.size());
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) inv.ops.push_back(inverse_op(*it));
    return inv;
}

/// In-place gate action on a state vector; avoids materializing the joint
/// unitary, so deep or many-site circuits stay cheap.
inline void apply_gate_inplace(VectorXcd& psi, const GateOp& op, const std::vector<int>& dims) {
    op.validate(dims);
    std::vector<std::int64_t> strides(dims.size());
    std::int64_t acc = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        strides[s] = acc;
        acc *= dims[s];
    }
    const std::int64_t n = psi.size();
    auto digit = [&](std::int64_t idx, int site) {
        return static_cast<int>((idx / strides[site]) % dims[site]);
    };
    switch (op.kind) {
        case GateKind::SubspaceX: {
            const int t = op.targets[0];
            const int k = op.subspace[0];
            const auto r = detail::axis_rotation(op.angle, op.phase);
            const std::int64_t step = strides[t];
            for (std::int64_t i = 0; i < n; ++i) {
                if (digit(i, t) != k) continue;
                const std::int64_t j = i + step;
                const Complex a = psi(i), b = psi(j);
                psi(i) = r(0, 0) * a + r(0, 1) * b;
                psi(j) = r(1, 0) * a + r(1, 1) * b;
            }
            break;
        }
        case GateKind::VirtualZ: {
            const int t = op.targets[0];
            const int k = op.subspace[0];
            const Complex ph = std::exp(Complex(0.0, op.angle));
            for (std::int64_t i = 0; i < n; ++i) {
                if (digit(i, t) > k) psi(i) *= ph;
            }
            break;
        }
        case GateKind::TwoPhotonSwap:
        case GateKind::SubspaceSwap: {
            const int a = op.targets[0], b = op.targets[1];
            const int k = op.subspace[0], l = op.subspace[1];
            const auto r = detail::axis_rotation(op.angle, op.phase);
            // span{|k,l>, |k+1,l+1>} or span{|k+1,l>, |k,l+1>}
            const bool two_photon = op.kind == GateKind::TwoPhotonSwap;
            const int da0 = two_photon ? k : k + 1;
            const int db0 = l;
            const std::int64_t offset =
                (two_photon ? strides[a] : -strides[a]) + strides[b];
            for (std::int64_t i = 0; i < n; ++i) {
                if (digit(i, a) != da0 || digit(i, b) != db0) continue;
                const std::int64_t j = i + offset;
                const Complex x = psi(i), y = psi(j);
                psi(i) = r(0, 0) * x + r(0, 1) * y;
                psi(j) = r(1, 0) * x + r(1, 1) * y;
            }
            break;
        }
        case GateKind::CrossKerr: {
            const int a = op.targets[0], b = op.targets[1];
            for (std::int64_t i = 0; i < n; ++i) {
                if (digit(i, a) == 1 && digit(i, b) == 2) psi(i) = -psi(i);
            }
            break;
        }
        case GateKind::PhaseCorrection: {
            const Complex ph = std::exp(Complex(0.0, op.angle));
            for (std::int64_t i = 0; i < n; ++i) {
                bool match = true;
                for (std::size_t t = 0; t < op.targets.size(); ++t) {
                    match &= digit(i, op.targets[t]) == op.subspace[t];
                }
                if (match) psi(i) *= ph;
            }
            break;
        }
    }
}

inline QuantumState apply_circuit(const Circuit& circuit, const QuantumState& state) {
    if (state.dims != circuit.dims) throw ShapeMismatchError("apply_circuit: dims mismatch");
    circuit.validate();
    if (state.is_density) {
        MatrixXcd rho = state.mat;
        for (const auto& op : circuit.ops) {
            const MatrixXcd u = gate_unitary(op, circuit.dims);
            rho = u * rho * u.adjoint();
        }
        return QuantumState::density(circuit.dims, std::move(rho));
    }
    VectorXcd psi = state.vec;
    for (const auto& op : circuit.ops) apply_gate_inplace(psi, op, circuit.dims);
    return QuantumState::pure(circuit.dims, std::move(psi));
}

inline MatrixXcd circuit_unitary(const Circuit& circuit) {
    const std::int64_t n = total_dim(circuit.dims);
    MatrixXcd u = MatrixXcd::Identity(n, n);
    for (const auto& op : circuit.ops) u = gate_unitary(op, circuit.dims) * u;
    return u;
}

// ---------------------------------------------------------------------------
// Circuit JSON (lossless round trip).

inline nlohmann::json circuit_to_json(const Circuit& circuit) {
    nlohmann::json j;
    j["dims"] = circuit.dims;
    j["ops"] = nlohmann::json::array();
    for (const auto& op : circuit.ops) {
        j["ops"].push_back({{"kind", gate_kind_name(op.kind)},
                            {"targets", op.targets},
                            {"subspace", op.subspace},
                            {"angle", op.angle},
                            {"phase", op.phase}});
    }
    return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
    Circuit c;
    c.dims = j.at("dims").get<std::vector<int>>();
    for (const auto& jop : j.at("ops")) {
        GateOp op;
        op.kind = gate_kind_from_name(jop.at("kind").get<std::string>());
        op.targets = jop.at("targets").get<std::vector<int>>();
        op.subspace = jop.at("subspace").get<std::vector<int>>();
        op.angle = jop.at("angle").get<double>();
        op.phase = jop.at("phase").get<double>();
        c.ops.push_back(std::move(op));
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Single-qudit SU(d) compilation into adjacent-level blocks.

namespace detail {

// Angles for Z(a)·X90·Z(b)·X90·Z(c) = e^{iγ}·C for an arbitrary 2x2 unitary
// C, with Z(φ) = diag(1, e^{iφ}) and X90 = axis_rotation(π/2, 0). Writing
// C = e^{iγ} U3(θ, φ, λ), direct algebra gives a = φ − π, b = π − θ, c = λ.
inline void zxzxz_angles(const Eigen::Matrix2cd& c_mat, double& a, double& b, double& c) {
    const double mag_cos = std::clamp(std::abs(c_mat(0, 0)), 0.0, 1.0);
    const double mag_sin = std::abs(c_mat(1, 0));
    const double theta = 2.0 * std::atan2(mag_sin, mag_cos);
    double phi = 0.0, lam = 0.0;
    if (mag_sin > 1e-12 && mag_cos > 1e-12) {
        const double g0 = std::arg(c_mat(0, 0));
        phi = std::arg(c_mat(1, 0)) - g0;
        lam = std::arg(-c_mat(0, 1)) - g0;
    } else if (mag_sin <= 1e-12) {
        phi = 0.0;
        lam = std::arg(c_mat(1, 1)) - std::arg(c_mat(0, 0));
    } else {
        phi = 0.0;
        lam = std::arg(-c_mat(0, 1)) - std::arg(c_mat(1, 0));
    }
    a = phi - M_PI;
    b = M_PI - theta;
    c = lam;
}

// Append cumulative virtual-Z gates realizing the diagonal phases
// diag(e^{i p_0}, ..., e^{i p_{d-1}}) up to a global phase.
inline void emit_virtual_z_chain(Circuit& circuit, int target, const std::vector<double>& phases) {
    double prev = phases[0];
    for (std::size_t k = 0; k + 1 < phases.size(); ++k) {
        double dphi = phases[k + 1] - prev;
        while (dphi > M_PI) dphi -= 2.0 * M_PI;
        while (dphi < -M_PI) dphi += 2.0 * M_PI;
        if (std::abs(dphi) > 1e-13) {
            circuit.ops.push_back(
                GateOp{GateKind::VirtualZ, {target}, {static_cast<int>(k)}, dphi, 0.0});
        }
        prev = phases[k + 1];
    }
}

}  // namespace detail

/// Compile a d x d unitary into adjacent-level two-level blocks, each emitted
/// as Z–X90–Z–X90–Z (virtual-Z bookkeeping plus two physical X90 pulses per
/// block) with exact diagonal fix-ups. The ordered op product equals `target`
/// up to global phase; at most d(d-1)/2 blocks.
inline Circuit decompose_su_d(const MatrixXcd& target, int d) {
    if (target.rows() != d || target.cols() != d) {
        throw ShapeMismatchError("decompose_su_d: shape mismatch");
    }
    if (((target.adjoint() * target) - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
        throw Error("decompose_su_d: input is not unitary");
    }

    // Givens phase: adjacent-row rotations G_m···G_1·U = diagonal, hence
    // U = B_1···B_m·D with B_i = G_i†.
    struct Block {
        int k;
        Eigen::Matrix2cd u;
    };
    MatrixXcd w = target;
    std::vector<Block> blocks;
    for (int col = 0; col < d - 1; ++col) {
        for (int row = d - 1; row > col; --row) {
            const Complex hi = w(row - 1, col);
            const Complex lo = w(row, col);
            if (std::abs(lo) < 1e-14) continue;
            const double nrm = std::sqrt(std::norm(hi) + std::norm(lo));
            Eigen::Matrix2cd g;
            g(0, 0) = std::conj(hi) / nrm;
            g(0, 1) = std::conj(lo) / nrm;
            g(1, 0) = -lo / nrm;
            g(1, 1) = hi / nrm;
            for (int c = 0; c < d; ++c) {
                const Complex r0 = w(row - 1, c), r1 = w(row, c);
                w(row - 1, c) = g(0, 0) * r0 + g(0, 1) * r1;
                w(row, c) = g(1, 0) * r0 + g(1, 1) * r1;
            }
            blocks.push_back({row - 1, g.adjoint()});
        }
    }

    Circuit circuit;
    circuit.dims = {d};
    const std::vector<int> dims{d};

    // Ops apply first-to-last, so matrix order is last-op·...·first-op: emit
    // the diagonal D first, then blocks B_m ... B_1.
    std::vector<double> dphases(d);
    for (int l = 0; l < d; ++l) dphases[l] = std::arg(w(l, l));
    detail::emit_virtual_z_chain(circuit, 0, dphases);

    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        double a, b, c;
        detail::zxzxz_angles(it->u, a, b, c);
        const std::size_t first = circuit.ops.size();
        circuit.ops.push_back(GateOp{GateKind::VirtualZ, {0}, {it->k}, c, 0.0});
        circuit.ops.push_back(GateOp{GateKind::SubspaceX, {0}, {it->k}, M_PI_2, 0.0});
        circuit.ops.push_back(GateOp{GateKind::VirtualZ, {0}, {it->k}, b, 0.0});
        circuit.ops.push_back(GateOp{GateKind::SubspaceX, {0}, {it->k}, M_PI_2, 0.0});
        circuit.ops.push_back(GateOp{GateKind::VirtualZ, {0}, {it->k}, a, 0.0});
        // Exact diagonal fix-up: the five ops realize embed(B) only up to a
        // block phase and a cumulative-Z spillover on higher levels.
        MatrixXcd m5 = MatrixXcd::Identity(d, d);
        for (std::size_t i = first; i < circuit.ops.size(); ++i) {
            m5 = gate_unitary(circuit.ops[i], dims) * m5;
        }
        MatrixXcd want = MatrixXcd::Identity(d, d);
        want(it->k, it->k) = it->u(0, 0);
        want(it->k, it->k + 1) = it->u(0, 1);
        want(it->k + 1, it->k) = it->u(1, 0);
        want(it->k + 1, it->k + 1) = it->u(1, 1);
        const MatrixXcd resid = want * m5.adjoint();
        for (int r = 0; r < d; ++r) {
            for (int cc = 0; cc < d; ++cc) {
                if (r != cc && std::abs(resid(r, cc)) > 1e-10) {
                    throw Error("decompose_su_d: internal block residual not diagonal");
                }
            }
        }
        std::vector<double> rphases(d);
        for (int l = 0; l < d; ++l) rphases[l] = std::arg(resid(l, l));
        detail::emit_virtual_z_chain(circuit, 0, rphases);
    }
    return circuit;
}

// ---------------------------------------------------------------------------
// Named circuits.

/// Bell_d preparation on two d-level qudits from |00>: a ladder of partial
/// two-photon swaps with amplitudes solved so every |kk> holds 1/d of the
/// population (ϑ_k = 2·arccos(1/sqrt(d−k))).
inline Circuit bell_prep_circuit(int d) {
    if (d < 2 || d > 4) throw Error("bell_prep_circuit: d must be in [2, 4]");
    Circuit c;
    c.dims = {d, d};
    for (int k = 0; k + 1 < d; ++k) {
        const double theta = 2.0 * std::acos(1.0 / std::sqrt(static_cast<double>(d - k)));
        c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {0, 1}, {k, k}, theta, 0.0});
    }
    return c;
}

/// NOON_4 preparation: half two-photon swap to (|00>+i|11>)/√2, then local
/// ladder permutations mapping qudit 0: 1->0, 0->3 and qudit 1: 0->0, 1->3,
/// yielding (|30> + e^{iα}|03>)/√2.
inline Circuit noon_prep_circuit(int d = 4) {
    if (d != 4) throw Error("noon_prep_circuit: d = 4 only");
    Circuit c;
    c.dims = {4, 4};
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {0, 1}, {0, 0}, M_PI_2, 0.0});
    for (int k : {0, 1, 2}) c.ops.push_back(GateOp{GateKind::SubspaceX, {0}, {k}, M_PI, 0.0});
    for (int k : {1, 2}) c.ops.push_back(GateOp{GateKind::SubspaceX, {1}, {k}, M_PI, 0.0});
    return c;
}

namespace detail {

// Decompose the diagonal phase residual of a qubit-subspace unitary into
// single-qudit level phases plus pairwise two-body phases; throws if a
// higher-body component remains. Returns the correction ops that cancel it.
inline std::vector<GateOp> phase_correction_ops(const MatrixXcd& u, const std::vector<int>& dims,
                                                const std::vector<double>& target_phases) {
    const int n = static_cast<int>(dims.size());
    const std::int64_t n_qubit = std::int64_t{1} << n;
    // Residual phases r(b) over qubit basis states b.
    std::vector<double> r(n_qubit);
    for (std::int64_t b = 0; b < n_qubit; ++b) {
        std::vector<int> digits(n);
        for (int i = 0; i < n; ++i) digits[i] = static_cast<int>((b >> i) & 1);
        const std::int64_t idx = ditstring_index(digits, dims);
        r[b] = std::arg(u(idx, idx)) - target_phases[b];
    }
    auto wrap = [](double x) {
        while (x > M_PI) x -= 2.0 * M_PI;
        while (x < -M_PI) x += 2.0 * M_PI;
        return x;
    };
    const double g = r[0];
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = wrap(r[std::int64_t{1} << i] - g);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const std::int64_t b = (std::int64_t{1} << i) | (std::int64_t{1} << j);
            w[i][j] = wrap(r[b] - g - z[i] - z[j]);
        }
    }
    // Verify the 1+2-body model reproduces every residual phase.
    for (std::int64_t b = 0; b < n_qubit; ++b) {
        double model = g;
        for (int i = 0; i < n; ++i) {
            if ((b >> i) & 1) model += z[i];
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (((b >> i) & 1) && ((b >> j) & 1)) model += w[i][j];
            }
        }
        if (std::abs(wrap(r[b] - model)) > 1e-9) {
            throw Error("phase_correction_ops: residual phases are not 1/2-body");
        }
    }

    std::vector<GateOp> ops;
    // Global piece: phase every level of qudit 0 by -g.
    if (std::abs(g) > 1e-13) {
        for (int lvl = 0; lvl < dims[0]; ++lvl) {
            ops.push_back(GateOp{GateKind::PhaseCorrection, {0}, {lvl}, -g, 0.0});
        }
    }
    for (int i = 0; i < n; ++i) {
        if (std::abs(z[i]) < 1e-13) continue;
        // -z_i on levels >= 1 (level 2 is unpopulated at circuit end).
        for (int lvl = 1; lvl < dims[i]; ++lvl) {
            ops.push_back(GateOp{GateKind::PhaseCorrection, {i}, {lvl}, -z[i], 0.0});
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(w[i][j]) < 1e-13) continue;
            ops.push_back(GateOp{GateKind::PhaseCorrection, {i, j}, {1, 1}, -w[i][j], 0.0});
        }
    }
    return ops;
}

}  // namespace detail

/// CCZ on three qutrits: shelve |11>_{Q2,Q3} into |22> with a +π two-photon
/// swap, apply the cross-Kerr gate on Q1–Q2, retrieve with the same +π swap,
/// then cancel the residual two-body ZZ phase read off the ideal
/// pre-correction unitary.
inline Circuit ccz_circuit() {
    Circuit c;
    c.dims = {3, 3, 3};
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {1, 2}, {1, 1}, M_PI, 0.0});
    c.ops.push_back(GateOp{GateKind::CrossKerr, {0, 1}, {}, 0.0, 0.0});
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {1, 2}, {1, 1}, M_PI, 0.0});

    const MatrixXcd u_pre = circuit_unitary(c);
    std::vector<double> target(8, 0.0);
    target[7] = M_PI;  // π only on |111>
    const auto correction = detail::phase_correction_ops(u_pre, c.dims, target);
    for (const auto& op : correction) c.ops.push_back(op);
    return c;
}

/// CCCZ-type gate on four qutrits (cross-Kerr on Q3–Q4, cascaded shelves on
/// Q1–Q2 and Q2–Q3, inverse-swap retrieves). Applies a π phase exactly on
/// |Q4 Q3 Q2 Q1> = |1110>.
inline Circuit cccz_circuit() {
    Circuit c;
    c.dims = {3, 3, 3, 3};
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {0, 1}, {1, 1}, M_PI, 0.0});
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {1, 2}, {1, 1}, M_PI, 0.0});
    c.ops.push_back(GateOp{GateKind::CrossKerr, {3, 2}, {}, 0.0, 0.0});
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {1, 2}, {1, 1}, -M_PI, 0.0});
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {0, 1}, {1, 1}, -M_PI, 0.0});

    const MatrixXcd u_pre = circuit_unitary(c);
    std::vector<double> target(16, 0.0);
    // π on (q1,q2,q3,q4) = (0,1,1,1), i.e. ditstring |1110>.
    target[0b1110] = M_PI;
    const auto correction = detail::phase_correction_ops(u_pre, c.dims, target);
    for (const auto& op : correction) c.ops.push_back(op);
    return c;
}

/// Restriction of a multi-qutrit unitary to the qubit (levels 0/1) subspace.
inline MatrixXcd qubit_restriction(const MatrixXcd& u, const std::vector<int>& dims) {
    const int n = static_cast<int>(dims.size());
    const std::int64_t n_qubit = std::int64_t{1} << n;
    std::vector<std::int64_t> idx(n_qubit);
    for (std::int64_t b = 0; b < n_qubit; ++b) {
        std::vector<int> digits(n);
        for (int i = 0; i < n; ++i) digits[i] = static_cast<int>((b >> i) & 1);
        idx[b] = ditstring_index(digits, dims);
    }
    MatrixXcd r(n_qubit, n_qubit);
    for (std::int64_t i = 0; i < n_qubit; ++i) {
        for (std::int64_t j = 0; j < n_qubit; ++j) r(i, j) = u(idx[i], idx[j]);
    }
    return r;
}

}  // namespace qladder
