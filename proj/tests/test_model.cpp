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
#include "qladder/model.hpp"
#include "qladder/rng.hpp"

using namespace qladder;

namespace {

MatrixXcd random_matrix(int n, Rng& rng) {
    MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) m(r, c) = rng.normal_complex();
    }
    return m;
}

}  // namespace

TEST_CASE("annihilation operator matrix elements") {
    const MatrixXcd a2 = annihilation_operator(2);
    REQUIRE(a2(0, 1).real() == 1.0);
    REQUIRE(a2(1, 0) == Complex(0, 0));
    REQUIRE(a2(0, 0) == Complex(0, 0));

    const MatrixXcd a3 = annihilation_operator(3);
    REQUIRE(a3(0, 1).real() == Catch::Approx(1.0));
    REQUIRE(a3(1, 2).real() == Catch::Approx(std::sqrt(2.0)));
    REQUIRE(a3.cwiseAbs().sum() == Catch::Approx(1.0 + std::sqrt(2.0)));

    const MatrixXcd a4 = annihilation_operator(4);
    REQUIRE(a4(2, 3).real() == Catch::Approx(std::sqrt(3.0)));

    REQUIRE_THROWS_AS(annihilation_operator(1), InvalidDimensionError);
}

TEST_CASE("operators are reproducible bit-identically") {
    const MatrixXcd a = annihilation_operator(5);
    const MatrixXcd b = annihilation_operator(5);
    REQUIRE((a - b).cwiseAbs().maxCoeff() == 0.0);
    const std::vector<int> dims{3, 4};
    const MatrixXcd e1 = embed_operator(annihilation_operator(3), 0, dims);
    const MatrixXcd e2 = embed_operator(annihilation_operator(3), 0, dims);
    REQUIRE((e1 - e2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embed_operator identity and ordering") {
    const std::vector<int> dims{2, 2};
    REQUIRE((embed_operator(MatrixXcd::Identity(2, 2), 0, dims) - MatrixXcd::Identity(4, 4))
                .cwiseAbs()
                .maxCoeff() == 0.0);

    // X on site 0 maps |00> to the ditstring |01> (printed |q1 q0>).
    MatrixXcd x(2, 2);
    x << 0, 1, 1, 0;
    const MatrixXcd ex = embed_operator(x, 0, dims);
    VectorXcd v = VectorXcd::Zero(4);
    v(0) = 1.0;
    const VectorXcd w = ex * v;
    REQUIRE(std::abs(w(ditstring_index({1, 0}, dims)) - Complex(1, 0)) < 1e-15);
    REQUIRE(ditstring_label(1, dims) == "01");

    // a on site 1 of [3,3] annihilates the |0>_1 sector.
    const std::vector<int> dims33{3, 3};
    const MatrixXcd a1 = embed_operator(annihilation_operator(3), 1, dims33);
    for (int q0 = 0; q0 < 3; ++q0) {
        VectorXcd basis = VectorXcd::Zero(9);
        basis(ditstring_index({q0, 0}, dims33)) = 1.0;
        REQUIRE((a1 * basis).norm() == 0.0);
    }

    REQUIRE_THROWS_AS(embed_operator(x, 0, dims33), ShapeMismatchError);
}

TEST_CASE("embedded operators on different sites commute") {
    Rng rng(42);
    const std::vector<int> dims{3, 2, 4};
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXcd a = random_matrix(3, rng);
        const MatrixXcd b = random_matrix(4, rng);
        const MatrixXcd ea = embed_operator(a, 0, dims);
        const MatrixXcd eb = embed_operator(b, 2, dims);
        REQUIRE((ea * eb - eb * ea).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("QuditParams invariants") {
    QuditParams q;
    q.dim = 3;
    q.freq01 = ghz(5.5);
    q.anharmonicity = mhz(270);
    REQUIRE_NOTHROW(q.validate());
    REQUIRE(q.transition_freq(1) == Catch::Approx(ghz(5.5) - mhz(270)));

    q.dim = 7;
    REQUIRE_THROWS_AS(q.validate(), InvalidDimensionError);
    q.dim = 3;
    q.anharmonicity = -mhz(100);
    REQUIRE_THROWS(q.validate());
    q.anharmonicity = mhz(270);
    q.charging_energy = 270e6;
    q.josephson_energy = 10e9;
    REQUIRE_THROWS_AS(q.validate(), OutOfRegimeError);
    q.josephson_energy = 20e9;
    REQUIRE_NOTHROW(q.validate());
}

TEST_CASE("QuantumState validation and canonical form") {
    auto st = QuantumState::basis({2, 2}, {0, 0});
    REQUIRE_NOTHROW(st.validate());

    VectorXcd v(4);
    v << Complex(0, 0.6), 0.0, 0.0, Complex(0.8, 0);
    auto s2 = QuantumState::pure({2, 2}, v);
    REQUIRE_NOTHROW(s2.validate());
    const auto canon = s2.canonical();
    REQUIRE(canon.vec(3).real() == Catch::Approx(0.8));
    REQUIRE(std::abs(canon.vec(3).imag()) < 1e-15);

    v(0) = 10.0;
    REQUIRE_THROWS_AS(QuantumState::pure({2, 2}, v).validate(), NonPhysicalStateError);

    MatrixXcd rho = MatrixXcd::Identity(4, 4) / 4.0;
    REQUIRE_NOTHROW(QuantumState::density({2, 2}, rho).validate());
    rho(0, 1) = 0.5;
    REQUIRE_THROWS_AS(QuantumState::density({2, 2}, rho).validate(), NonPhysicalStateError);
}

TEST_CASE("norm preservation for unitaries built from gate ops") {
    Rng rng(7);
    const std::vector<int> dims{3, 3};
    for (int trial = 0; trial < 25; ++trial) {
        VectorXcd v(9);
        for (int i = 0; i < 9; ++i) v(i) = rng.normal_complex();
        v.normalize();
        auto state = QuantumState::pure(dims, v);

        GateOp op;
        switch (trial % 4) {
            case 0:
                op = GateOp{GateKind::SubspaceX, {trial % 2}, {trial % 2 == 0 ? 0 : 1},
                            rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)};
                break;
            case 1:
                op = GateOp{GateKind::VirtualZ, {0}, {1}, rng.uniform(0, kTwoPi), 0.0};
                break;
            case 2:
                op = GateOp{GateKind::TwoPhotonSwap, {0, 1}, {0, 0}, rng.uniform(0, kTwoPi),
                            rng.uniform(0, kTwoPi)};
                break;
            default:
                op = GateOp{GateKind::CrossKerr, {0, 1}, {}, 0.0, 0.0};
                break;
        }
        Circuit c;
        c.dims = dims;
        c.ops.push_back(op);
        const auto out = apply_circuit(c, state);
        REQUIRE(std::abs(out.vec.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("DressedAngles and InteractionRates invariants hold by construction") {
    const double delta = mhz(120), omega = mhz(80);
    const double theta = std::atan2(omega, delta);
    REQUIRE(std::cos(theta) == Catch::Approx(delta / std::hypot(delta, omega)).epsilon(1e-12));
    InteractionRates r;
    r.j_i = 1.5;
    r.j_q = -2.0;
    r.omega_2p = 4.0 * std::hypot(r.j_i, r.j_q);
    REQUIRE(r.omega_2p == Catch::Approx(4.0 * std::sqrt(1.5 * 1.5 + 4.0)).epsilon(1e-9));
}

TEST_CASE("DriveTone envelope shape") {
    DriveTone t;
    t.amp = mhz(10);
    t.ramp_time = 100e-9;
    t.hold_time = 400e-9;
    REQUIRE(t.envelope(0.0) == 0.0);
    REQUIRE(t.envelope(50e-9) == Catch::Approx(0.5));
    REQUIRE(t.envelope(100e-9) == Catch::Approx(1.0));
    REQUIRE(t.envelope(300e-9) == 1.0);
    REQUIRE(t.envelope(550e-9) == Catch::Approx(0.5));
    REQUIRE(t.envelope(600e-9) == 0.0);
    // symmetric ramp-down
    REQUIRE(t.envelope(30e-9) == Catch::Approx(t.envelope(600e-9 - 30e-9)));
}
