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

#include <catch2/catch_amalgamated.hpp>

#include "qladder/circuits.hpp"
#include "qladder/rng.hpp"

using namespace qladder;

namespace {

MatrixXcd haar_unitary(int n, Rng& rng) {
    MatrixXcd g(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) g(r, c) = rng.normal_complex();
    }
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd q = qr.householderQ();
    const MatrixXcd r = q.adjoint() * g;
    for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
}

double phase_aligned_error(const MatrixXcd& a, const MatrixXcd& b) {
    const Complex tr = (b.adjoint() * a).trace();
    const Complex phase = tr / std::abs(tr);
    return (a - phase * b).cwiseAbs().maxCoeff();
}

int x90_count(const Circuit& c) {
    int n = 0;
    for (const auto& op : c.ops) {
        if (op.kind == GateKind::SubspaceX) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("two-photon swap phase convention |ll> -> i|l+1,l+1>") {
    const std::vector<int> dims{3, 3};
    GateOp op{GateKind::TwoPhotonSwap, {0, 1}, {0, 0}, M_PI, 0.0};
    const MatrixXcd u = gate_unitary(op, dims);
    VectorXcd v = VectorXcd::Zero(9);
    v(ditstring_index({0, 0}, dims)) = 1.0;
    const VectorXcd w = u * v;
    REQUIRE(std::abs(w(ditstring_index({1, 1}, dims)) - Complex(0, 1)) < 1e-14);
    // and the reverse direction carries the same phase
    VectorXcd v2 = VectorXcd::Zero(9);
    v2(ditstring_index({1, 1}, dims)) = 1.0;
    REQUIRE(std::abs((u * v2)(ditstring_index({0, 0}, dims)) - Complex(0, 1)) < 1e-14);
}

TEST_CASE("virtual Z phases all levels above the subspace") {
    const std::vector<int> dims{3};
    GateOp op{GateKind::VirtualZ, {0}, {1}, 0.77, 0.0};
    const MatrixXcd u = gate_unitary(op, dims);
    REQUIRE(u(0, 0) == Complex(1, 0));
    REQUIRE(u(1, 1) == Complex(1, 0));
    REQUIRE(std::abs(u(2, 2) - std::exp(Complex(0, 0.77))) < 1e-15);

    GateOp op0{GateKind::VirtualZ, {0}, {0}, 0.5, 0.0};
    const MatrixXcd u0 = gate_unitary(op0, dims);
    REQUIRE(std::abs(u0(1, 1) - std::exp(Complex(0, 0.5))) < 1e-15);
    REQUIRE(std::abs(u0(2, 2) - std::exp(Complex(0, 0.5))) < 1e-15);
}

TEST_CASE("cross-Kerr is an involution") {
    const std::vector<int> dims{3, 3};
    GateOp op{GateKind::CrossKerr, {0, 1}, {}, 0.0, 0.0};
    const MatrixXcd u = gate_unitary(op, dims);
    REQUIRE((u * u - MatrixXcd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-15);
    REQUIRE(u(ditstring_index({1, 2}, dims), ditstring_index({1, 2}, dims)).real() == -1.0);
}

TEST_CASE("every gate unitary is unitary") {
    Rng rng(5);
    const std::vector<int> dims{3, 4};
    std::vector<GateOp> ops = {
        GateOp{GateKind::SubspaceX, {0}, {1}, rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)},
        GateOp{GateKind::VirtualZ, {1}, {2}, rng.uniform(0, kTwoPi), 0.0},
        GateOp{GateKind::TwoPhotonSwap, {0, 1}, {1, 2}, rng.uniform(0, kTwoPi),
               rng.uniform(0, kTwoPi)},
        GateOp{GateKind::SubspaceSwap, {0, 1}, {0, 1}, rng.uniform(0, kTwoPi), 0.3},
        GateOp{GateKind::CrossKerr, {0, 1}, {}, 0.0, 0.0},
        GateOp{GateKind::PhaseCorrection, {0, 1}, {2, 3}, 1.2, 0.0},
        GateOp{GateKind::PhaseCorrection, {1}, {0}, -0.4, 0.0},
    };
    for (const auto& op : ops) {
        const MatrixXcd u = gate_unitary(op, dims);
        REQUIRE((u.adjoint() * u - MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("two-photon swap angle inverse on its subspace") {
    Rng rng(9);
    const std::vector<int> dims{4, 4};
    for (int i = 0; i < 20; ++i) {
        const double theta = rng.uniform(-kTwoPi, kTwoPi);
        const double beta = rng.uniform(0, kTwoPi);
        GateOp a{GateKind::TwoPhotonSwap, {0, 1}, {1, 1}, theta, beta};
        GateOp b{GateKind::TwoPhotonSwap, {0, 1}, {1, 1}, -theta, beta};
        const MatrixXcd u = gate_unitary(a, dims) * gate_unitary(b, dims);
        REQUIRE((u - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("subspace swap rotates span{|k+1,l>, |k,l+1>}") {
    const std::vector<int> dims{3, 3};
    GateOp op{GateKind::SubspaceSwap, {0, 1}, {0, 0}, M_PI, 0.0};
    const MatrixXcd u = gate_unitary(op, dims);
    VectorXcd v = VectorXcd::Zero(9);
    v(ditstring_index({1, 0}, dims)) = 1.0;
    REQUIRE(std::abs((u * v)(ditstring_index({0, 1}, dims)) - Complex(0, 1)) < 1e-14);
}

TEST_CASE("apply_circuit: empty, inverse round trip, norm") {
    Rng rng(21);
    const std::vector<int> dims{3, 3};
    VectorXcd v(9);
    for (int i = 0; i < 9; ++i) v(i) = rng.normal_complex();
    v.normalize();
    const auto st = QuantumState::pure(dims, v);

    Circuit empty;
    empty.dims = dims;
    const auto same = apply_circuit(empty, st);
    REQUIRE((same.vec - st.vec).norm() == 0.0);

    Circuit c;
    c.dims = dims;
    for (int i = 0; i < 6; ++i) {
        c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {0, 1}, {i % 2, i % 2},
                               rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)});
        c.ops.push_back(GateOp{GateKind::SubspaceX, {i % 2}, {0}, rng.uniform(0, kTwoPi),
                               rng.uniform(0, kTwoPi)});
    }
    const auto fwd = apply_circuit(c, st);
    REQUIRE(std::abs(fwd.vec.norm() - 1.0) < 1e-12);
    const auto back = apply_circuit(c.inverse(), fwd);
    REQUIRE((back.vec - st.vec).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("circuit JSON round trip is lossless") {
    Rng rng(31);
    Circuit c;
    c.dims = {3, 3, 3};
    for (int i = 0; i < 12; ++i) {
        const int kind = static_cast<int>(rng.uniform_index(3));
        if (kind == 0) {
            c.ops.push_back(GateOp{GateKind::SubspaceX, {static_cast<int>(rng.uniform_index(3))},
                                   {static_cast<int>(rng.uniform_index(2))},
                                   rng.uniform(-10, 10), rng.uniform(-10, 10)});
        } else if (kind == 1) {
            c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {0, 2},
                                   {static_cast<int>(rng.uniform_index(2)), 1},
                                   rng.uniform(-10, 10), rng.uniform(-10, 10)});
        } else {
            c.ops.push_back(GateOp{GateKind::VirtualZ, {1}, {0}, rng.uniform(-10, 10), 0.0});
        }
    }
    const auto j = circuit_to_json(c);
    const auto text = j.dump();
    const auto c2 = circuit_from_json(nlohmann::json::parse(text));
    REQUIRE(c2.dims == c.dims);
    REQUIRE(c2.ops.size() == c.ops.size());
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        REQUIRE(c2.ops[i].kind == c.ops[i].kind);
        REQUIRE(c2.ops[i].targets == c.ops[i].targets);
        REQUIRE(c2.ops[i].subspace == c.ops[i].subspace);
        REQUIRE(c2.ops[i].angle == c.ops[i].angle);  // bit-exact
        REQUIRE(c2.ops[i].phase == c.ops[i].phase);
    }
}

TEST_CASE("decompose_su_d: identity and adjacent-level inputs") {
    const auto empty = decompose_su_d(MatrixXcd::Identity(3, 3), 3);
    REQUIRE(empty.ops.empty());

    MatrixXcd x01 = MatrixXcd::Identity(3, 3);
    x01(0, 0) = 0.0;
    x01(1, 1) = 0.0;
    x01(0, 1) = 1.0;
    x01(1, 0) = 1.0;
    const auto c = decompose_su_d(x01, 3);
    REQUIRE(x90_count(c) == 2);  // one SU(2) block
    REQUIRE(phase_aligned_error(circuit_unitary(c), x01) < 1e-10);

    MatrixXcd not_unitary = MatrixXcd::Identity(3, 3) * 2.0;
    REQUIRE_THROWS(decompose_su_d(not_unitary, 3));
}

TEST_CASE("decompose_su_d round-trips random unitaries") {
    Rng rng(77);
    for (int d : {3, 4}) {
        const int max_blocks = d * (d - 1) / 2;
        for (int trial = 0; trial < 100; ++trial) {
            const MatrixXcd u = haar_unitary(d, rng);
            const auto c = decompose_su_d(u, d);
            REQUIRE(x90_count(c) <= 2 * max_blocks);
            REQUIRE(phase_aligned_error(circuit_unitary(c), u) < 1e-8);
        }
    }
}

TEST_CASE("bell preparation amplitudes") {
    for (int d : {2, 3, 4}) {
        const auto c = bell_prep_circuit(d);
        REQUIRE(c.count_kind(GateKind::TwoPhotonSwap) == d - 1);
        const auto out = apply_circuit(c, QuantumState::basis(c.dims, {0, 0}));
        for (int k = 0; k < d; ++k) {
            REQUIRE(out.population(ditstring_index({k, k}, c.dims)) ==
                    Catch::Approx(1.0 / d).margin(1e-10));
        }
    }
    // Stage-1 state of Bell_3: |c00|² = 1/3, |c11|² = 2/3.
    auto c3 = bell_prep_circuit(3);
    Circuit first;
    first.dims = c3.dims;
    first.ops = {c3.ops[0]};
    const auto mid = apply_circuit(first, QuantumState::basis(c3.dims, {0, 0}));
    REQUIRE(mid.population(0) == Catch::Approx(1.0 / 3).margin(1e-12));
    REQUIRE(mid.population(ditstring_index({1, 1}, c3.dims)) ==
            Catch::Approx(2.0 / 3).margin(1e-12));

    REQUIRE_THROWS(bell_prep_circuit(5));
}

TEST_CASE("noon preparation") {
    const auto c = noon_prep_circuit(4);
    const auto out = apply_circuit(c, QuantumState::basis(c.dims, {0, 0}));
    const auto i30 = ditstring_index({3, 0}, c.dims);
    const auto i03 = ditstring_index({0, 3}, c.dims);
    REQUIRE(out.population(i30) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(out.population(i03) == Catch::Approx(0.5).margin(1e-12));
    for (std::int64_t i = 0; i < 16; ++i) {
        if (i != i30 && i != i03) REQUIRE(out.population(i) < 1e-10);
    }
    // Fidelity to the ideal NOON family, optimized over the relative phase.
    const double f = 0.5 * std::pow(std::abs(out.vec(i30)) + std::abs(out.vec(i03)), 2);
    REQUIRE(f == Catch::Approx(1.0).margin(1e-10));

    // N = 1 degenerate case: Bell_2 plus a local ladder X is a NOON_2 state.
    auto b2 = bell_prep_circuit(2);
    b2.ops.push_back(GateOp{GateKind::SubspaceX, {0}, {0}, M_PI, 0.0});
    const auto noon2 = apply_circuit(b2, QuantumState::basis(b2.dims, {0, 0}));
    REQUIRE(noon2.population(ditstring_index({1, 0}, b2.dims)) == Catch::Approx(0.5));
    REQUIRE(noon2.population(ditstring_index({0, 1}, b2.dims)) == Catch::Approx(0.5));
}

namespace {

// Diagonal of the qubit-subspace restriction, with basis index bit i = qudit i.
void require_diagonal_phase_gate(const MatrixXcd& restricted, std::int64_t flagged) {
    const std::int64_t n = restricted.rows();
    for (std::int64_t r = 0; r < n; ++r) {
        for (std::int64_t c = 0; c < n; ++c) {
            const Complex want = (r != c) ? Complex(0, 0)
                                          : (r == flagged ? Complex(-1, 0) : Complex(1, 0));
            REQUIRE(std::abs(restricted(r, c) - want) < 1e-9);
        }
    }
}

}  // namespace

TEST_CASE("CCZ: ideal three-qubit phase gate on qutrits") {
    const auto c = ccz_circuit();
    const MatrixXcd u = circuit_unitary(c);
    const MatrixXcd r = qubit_restriction(u, c.dims);
    require_diagonal_phase_gate(r, 7);  // -1 only at |111>

    // Phase of Q1 flips by π only for control |11> on (Q2, Q3).
    for (int q2 = 0; q2 < 2; ++q2) {
        for (int q3 = 0; q3 < 2; ++q3) {
            const auto i0 = ditstring_index({0, q2, q3}, c.dims);
            const auto i1 = ditstring_index({1, q2, q3}, c.dims);
            const double target_phase = std::arg(u(i1, i1) / u(i0, i0));
            if (q2 == 1 && q3 == 1) {
                REQUIRE(std::abs(std::abs(target_phase) - M_PI) < 1e-9);
            } else {
                REQUIRE(std::abs(target_phase) < 1e-9);
            }
        }
    }

    // No leakage out of the qubit subspace for any qubit-basis input.
    for (std::int64_t b = 0; b < 8; ++b) {
        std::vector<int> digits{static_cast<int>(b & 1), static_cast<int>((b >> 1) & 1),
                                static_cast<int>((b >> 2) & 1)};
        const auto out = apply_circuit(c, QuantumState::basis(c.dims, digits));
        double leak = 0.0;
        for (std::int64_t i = 0; i < 27; ++i) {
            const auto dg = index_to_digits(i, c.dims);
            if (dg[0] > 1 || dg[1] > 1 || dg[2] > 1) leak += out.population(i);
        }
        REQUIRE(leak < 1e-10);
    }

    // The correction stage cancels a genuine two-body ZZ residual.
    REQUIRE(c.count_kind(GateKind::PhaseCorrection) > 0);
}

TEST_CASE("CCCZ: ideal four-qubit phase gate with control |110>") {
    const auto c = cccz_circuit();
    const MatrixXcd u = circuit_unitary(c);
    const MatrixXcd r = qubit_restriction(u, c.dims);
    require_diagonal_phase_gate(r, 0b1110);  // π only on |Q4Q3Q2Q1> = |1110>

    // Hadamard sandwich on Q4: exact truth-table permutation flipping the
    // target iff the controls read |Q3Q2Q1> = |110>.
    MatrixXcd h = MatrixXcd::Identity(3, 3);
    const double s = 1.0 / std::sqrt(2.0);
    h(0, 0) = s;
    h(0, 1) = s;
    h(1, 0) = s;
    h(1, 1) = -s;
    const MatrixXcd hq4 = embed_operator(h, 3, c.dims);
    const MatrixXcd sandwich = qubit_restriction(hq4 * u * hq4, c.dims);
    for (std::int64_t b = 0; b < 16; ++b) {
        const bool controls_110 = ((b & 1) == 0) && ((b >> 1) & 1) && ((b >> 2) & 1);
        const std::int64_t expect = controls_110 ? (b ^ 0b1000) : b;
        for (std::int64_t rr = 0; rr < 16; ++rr) {
            const double want = (rr == expect) ? 1.0 : 0.0;
            REQUIRE(std::abs(std::abs(sandwich(rr, b)) - want) < 1e-9);
        }
    }
}

TEST_CASE("in-place gate action matches the dense unitary") {
    Rng rng(404);
    const std::vector<int> dims{3, 4, 2};
    const std::int64_t n = total_dim(dims);
    for (int trial = 0; trial < 60; ++trial) {
        VectorXcd psi(n);
        for (std::int64_t i = 0; i < n; ++i) psi(i) = rng.normal_complex();
        psi.normalize();
        GateOp op;
        switch (trial % 6) {
            case 0:
                op = GateOp{GateKind::SubspaceX, {1}, {static_cast<int>(rng.uniform_index(3))},
                            rng.uniform(-4, 4), rng.uniform(0, kTwoPi)};
                break;
            case 1:
                op = GateOp{GateKind::VirtualZ, {0}, {static_cast<int>(rng.uniform_index(2))},
                            rng.uniform(-4, 4), 0.0};
                break;
            case 2:
                op = GateOp{GateKind::TwoPhotonSwap, {0, 1},
                            {static_cast<int>(rng.uniform_index(2)),
                             static_cast<int>(rng.uniform_index(3))},
                            rng.uniform(-4, 4), rng.uniform(0, kTwoPi)};
                break;
            case 3:
                op = GateOp{GateKind::SubspaceSwap, {0, 1},
                            {static_cast<int>(rng.uniform_index(2)),
                             static_cast<int>(rng.uniform_index(3))},
                            rng.uniform(-4, 4), rng.uniform(0, kTwoPi)};
                break;
            case 4:
                op = GateOp{GateKind::CrossKerr, {2, 1}, {}, 0.0, 0.0};
                break;
            default:
                op = GateOp{GateKind::PhaseCorrection, {0, 2}, {1, 1}, rng.uniform(-4, 4), 0.0};
                break;
        }
        const VectorXcd dense = gate_unitary(op, dims) * psi;
        VectorXcd inplace = psi;
        apply_gate_inplace(inplace, op, dims);
        REQUIRE((dense - inplace).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("qutrit gates leave every non-participating phase at zero") {
    for (const auto& c : {ccz_circuit(), cccz_circuit()}) {
        const MatrixXcd u = circuit_unitary(c);
        const std::int64_t n_qubit = std::int64_t{1} << c.dims.size();
        for (std::int64_t b = 0; b < n_qubit; ++b) {
            std::vector<int> digits(c.dims.size());
            for (std::size_t i = 0; i < c.dims.size(); ++i) {
                digits[i] = static_cast<int>((b >> i) & 1);
            }
            const auto idx = ditstring_index(digits, c.dims);
            const Complex diag = u(idx, idx);
            const bool flagged = (c.dims.size() == 3) ? (b == 7) : (b == 0b1110);
            if (flagged) {
                REQUIRE(std::abs(diag - Complex(-1, 0)) < 1e-9);
            } else {
                REQUIRE(std::abs(diag - Complex(1, 0)) < 1e-9);
            }
        }
    }
}
