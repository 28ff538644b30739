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

#include "qladder/synthesis.hpp"
#include "qladder/rng.hpp"

using namespace qladder;

namespace {

SearchState uniform_state(const std::vector<int>& dims,
                          const std::vector<std::vector<int>>& digit_sets,
                          const std::vector<int>& phases = {}) {
    SearchState st;
    st.dims = dims;
    for (std::size_t i = 0; i < digit_sets.size(); ++i) {
        const int p = phases.empty() ? 0 : phases[i];
        st.branches.push_back({static_cast<std::int32_t>(ditstring_index(digit_sets[i], dims)),
                               static_cast<std::uint8_t>(p)});
    }
    return canonicalize(st);
}

SearchState bell_with_ancilla(int d) {
    const int sd = std::max(d, 3);
    std::vector<std::vector<int>> digits;
    for (int k = 0; k < d; ++k) digits.push_back({k, k, 0});
    return uniform_state({sd, sd, sd}, digits);
}

SearchState ghz_state(int d) {
    const int sd = std::max(d, 3);
    std::vector<std::vector<int>> digits;
    for (int k = 0; k < d; ++k) digits.push_back({k, k, k});
    return uniform_state({sd, sd, sd}, digits);
}

// Simulated fidelity of `circuit` applied to `input`, against the reached
// symbolic state reported by the search (exact branch phases included).
double simulated_state_fidelity(const Circuit& circuit, const VectorXcd& input,
                                const SearchState& reached) {
    const auto out = apply_circuit(circuit, QuantumState::pure(circuit.dims, input));
    const VectorXcd expect = search_state_to_vector(reached);
    return std::norm(expect.dot(out.vec));
}

}  // namespace

TEST_CASE("canonicalize fixes the global phase") {
    const std::vector<int> dims{3, 3};
    // i(|00> + |11>) -> |00> + |11>
    auto a = uniform_state(dims, {{0, 0}, {1, 1}}, {1, 1});
    REQUIRE(a.branches[0].second == 0);
    REQUIRE(a.branches[1].second == 0);

    // |00> + i|11> and i(|00> + i|11>) share one canonical key.
    auto b = uniform_state(dims, {{0, 0}, {1, 1}}, {0, 1});
    auto c = uniform_state(dims, {{0, 0}, {1, 1}}, {1, 2});
    REQUIRE(b == c);

    // -(|00> - |11>) -> |00> - |11>
    auto d = uniform_state(dims, {{0, 0}, {1, 1}}, {2, 0});
    REQUIRE(d.branches[0].second == 0);
    REQUIRE(d.branches[1].second == 2);

    // canonicalization is idempotent
    REQUIRE(canonicalize(d) == d);
}

TEST_CASE("search states reject non-uniform magnitudes and foreign phases") {
    const std::vector<int> dims{2, 2};
    VectorXcd bad(4);
    bad << std::sqrt(1.0 / 3.0), 0.0, 0.0, std::sqrt(2.0 / 3.0);
    REQUIRE_THROWS_AS(search_state_from_vector(bad, dims), NotSynthesizableError);

    VectorXcd odd(4);
    odd << std::exp(Complex(0, 0.3)) / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    REQUIRE_THROWS_AS(search_state_from_vector(odd, dims), NotSynthesizableError);

    VectorXcd good(4);
    good << 1.0 / std::sqrt(2.0), 0.0, 0.0, Complex(0, -1.0) / std::sqrt(2.0);
    const auto st = search_state_from_vector(good, dims);
    REQUIRE(st.branches.size() == 2);
    REQUIRE(st.branches[1].second == 3);
}

TEST_CASE("gate-set closure: every gate maps valid states to valid states") {
    Rng rng(99);
    const std::vector<int> dims{4, 4, 4};
    SynthGateSet gs;
    const auto gates = enumerate_gates(dims, gs);
    for (int trial = 0; trial < 300; ++trial) {
        // random valid state with 1-5 branches
        const int n_br = 1 + static_cast<int>(rng.uniform_index(5));
        SearchState st;
        st.dims = dims;
        while (static_cast<int>(st.branches.size()) < n_br) {
            const std::int32_t idx = static_cast<std::int32_t>(rng.uniform_index(64));
            bool dup = false;
            for (const auto& b : st.branches) dup |= (b.first == idx);
            if (!dup) {
                st.branches.push_back({idx, static_cast<std::uint8_t>(rng.uniform_index(4))});
            }
        }
        st = canonicalize(std::move(st));
        const auto& g = gates[rng.uniform_index(gates.size())];
        SearchState out;
        if (!detail::apply_synth_gate(st, g, out)) continue;
        REQUIRE(out.branches.size() == st.branches.size());
        REQUIRE_NOTHROW(canonicalize(out));
        // uniform magnitudes survive by construction: vector round trip works
        REQUIRE_NOTHROW(search_state_from_vector(search_state_to_vector(out), dims));
    }
}

TEST_CASE("dijkstra: trivial and kernel queries") {
    // target = start -> empty circuit
    const auto st = bell_with_ancilla(3);
    const auto trivial = dijkstra_synthesize(st, st);
    REQUIRE(trivial.circuit.ops.empty());
    REQUIRE(trivial.cost == 0);

    SynthGateSet gs;
    gs.active_sites = {1, 2};

    // d=2 kernel: exactly one two-photon swap.
    const auto r2 = dijkstra_synthesize(bell_with_ancilla(2), ghz_state(2), gs, 5000000, true);
    REQUIRE(r2.two_qudit_count == 1);
    REQUIRE(simulated_state_fidelity(r2.circuit, search_state_to_vector(bell_with_ancilla(2)),
                                     r2.reached) > 1.0 - 1e-9);

    // d=3 kernel: two swaps plus interleaved X gates, matching the analytic
    // kernel's gate count.
    const auto r3 = dijkstra_synthesize(bell_with_ancilla(3), ghz_state(3), gs, 5000000, true);
    REQUIRE(r3.two_qudit_count == 2);
    const auto analytic3 = ghz_kernel_analytic(3);
    REQUIRE(r3.two_qudit_count == analytic3.count_kind(GateKind::TwoPhotonSwap));
    const std::int64_t analytic3_cost =
        100 * analytic3.count_kind(GateKind::TwoPhotonSwap) +
        analytic3.count_kind(GateKind::SubspaceX);
    REQUIRE(r3.cost <= analytic3_cost);
    REQUIRE(simulated_state_fidelity(r3.circuit, search_state_to_vector(bell_with_ancilla(3)),
                                     r3.reached) > 1.0 - 1e-9);

    // Determinism: the same query returns the same circuit.
    const auto r3b = dijkstra_synthesize(bell_with_ancilla(3), ghz_state(3), gs, 5000000, true);
    REQUIRE(r3b.circuit.ops.size() == r3.circuit.ops.size());
    for (std::size_t i = 0; i < r3.circuit.ops.size(); ++i) {
        REQUIRE(r3b.circuit.ops[i].kind == r3.circuit.ops[i].kind);
        REQUIRE(r3b.circuit.ops[i].targets == r3.circuit.ops[i].targets);
        REQUIRE(r3b.circuit.ops[i].subspace == r3.circuit.ops[i].subspace);
    }
}

TEST_CASE("dijkstra: exhausted budget reports the frontier") {
    SynthGateSet gs;
    try {
        dijkstra_synthesize(bell_with_ancilla(4), ghz_state(4), gs, 2000, true);
        FAIL("expected SearchExhaustedError");
    } catch (const SearchExhaustedError& e) {
        REQUIRE(e.frontier_size > 0);
    }
}

TEST_CASE("analytic GHZ kernel: d-1 swaps and correct output for d up to 6") {
    for (int d = 2; d <= 6; ++d) {
        const auto kernel = ghz_kernel_analytic(d);
        REQUIRE(kernel.count_kind(GateKind::TwoPhotonSwap) == d - 1);
        // Σ|k,k,0> -> Σ|k,k,k> up to branch phases.
        VectorXcd in = VectorXcd::Zero(total_dim(kernel.dims));
        for (int k = 0; k < d; ++k) {
            in(ditstring_index({k, k, 0}, kernel.dims)) = 1.0 / std::sqrt(static_cast<double>(d));
        }
        const auto out = apply_circuit(kernel, QuantumState::pure(kernel.dims, in));
        double mass = 0.0;
        for (int k = 0; k < d; ++k) {
            const double p = out.population(ditstring_index({k, k, k}, kernel.dims));
            REQUIRE(p == Catch::Approx(1.0 / d).margin(1e-10));
            mass += p;
        }
        REQUIRE(mass == Catch::Approx(1.0).margin(1e-10));
    }
    REQUIRE_THROWS(ghz_kernel_analytic(7));
}

TEST_CASE("ghz_circuit: count law and simulated output") {
    for (int n = 2; n <= 5; ++n) {
        for (int d = 2; d <= 4; ++d) {
            const auto c = ghz_circuit(n, d);
            REQUIRE(c.count_kind(GateKind::TwoPhotonSwap) == (n - 1) * (d - 1));
        }
    }
    // n=4, d=3: (n-1)(d-1) = 6 swaps, populations 1/3 on |kkkk>.
    const auto c43 = ghz_circuit(4, 3);
    REQUIRE(c43.count_kind(GateKind::TwoPhotonSwap) == 6);
    auto out = apply_circuit(c43, QuantumState::basis(c43.dims, {0, 0, 0, 0}));
    for (int k = 0; k < 3; ++k) {
        REQUIRE(out.population(ditstring_index({k, k, k, k}, c43.dims)) ==
                Catch::Approx(1.0 / 3).margin(1e-10));
    }
    REQUIRE(ghz_family_fidelity(out, 3) > 1.0 - 1e-9);

    // n=3, d=2: the standard GHZ with two swaps.
    const auto c32 = ghz_circuit(3, 2);
    REQUIRE(c32.count_kind(GateKind::TwoPhotonSwap) == 2);
    out = apply_circuit(c32, QuantumState::basis(c32.dims, {0, 0, 0}));
    REQUIRE(out.population(0) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(out.population(ditstring_index({1, 1, 1}, c32.dims)) ==
            Catch::Approx(0.5).margin(1e-12));
    REQUIRE(ghz_family_fidelity(out, 2) > 1.0 - 1e-9);

    // n=2 degenerates to Bell_d.
    const auto c24 = ghz_circuit(2, 4);
    REQUIRE(c24.count_kind(GateKind::TwoPhotonSwap) == 3);
    out = apply_circuit(c24, QuantumState::basis(c24.dims, {0, 0}));
    REQUIRE(ghz_family_fidelity(out, 4) > 1.0 - 1e-9);
}

TEST_CASE("cat circuits") {
    // n=2, d=4: populations 0.5 on |00> and |33>.
    const auto c24 = cat_circuit(2, 4);
    auto out = apply_circuit(c24, QuantumState::basis(c24.dims, {0, 0}));
    REQUIRE(out.population(ditstring_index({0, 0}, c24.dims)) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(out.population(ditstring_index({3, 3}, c24.dims)) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(cat_family_fidelity(out, 4) > 1.0 - 1e-9);

    // n=3, d=4 via the state-graph search.
    const auto c34 = cat_circuit(3, 4);
    out = apply_circuit(c34, QuantumState::basis(c34.dims, {0, 0, 0}));
    REQUIRE(out.population(ditstring_index({0, 0, 0}, c34.dims)) ==
            Catch::Approx(0.5).margin(1e-9));
    REQUIRE(out.population(ditstring_index({3, 3, 3}, c34.dims)) ==
            Catch::Approx(0.5).margin(1e-9));
    REQUIRE(cat_family_fidelity(out, 4) > 1.0 - 1e-9);

    // n=2, d=2 is Bell_2.
    const auto c22 = cat_circuit(2, 2);
    out = apply_circuit(c22, QuantumState::basis(c22.dims, {0, 0}));
    REQUIRE(out.population(0) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(out.population(3) == Catch::Approx(0.5).margin(1e-12));

    REQUIRE_THROWS(cat_circuit(4, 4));
}
