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

#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

#include "qladder/circuits.hpp"
#include "qladder/errors.hpp"
#include "qladder/model.hpp"

namespace qladder {

/// Unparameterized search state: a set of basis ditstrings with equal
/// magnitudes and phases in {+1, i, -1, -i} (stored as powers of i). The
/// canonical form divides out the global phase so the lexicographically
/// first branch carries +1.
struct SearchState {
    std::vector<int> dims;
    // (ditstring index, phase exponent p with amplitude i^p), sorted by index.
    std::vector<std::pair<std::int32_t, std::uint8_t>> branches;

    bool operator==(const SearchState& other) const {
        return dims == other.dims && branches == other.branches;
    }
};

inline SearchState canonicalize(SearchState state) {
    if (state.branches.empty()) throw NotSynthesizableError("canonicalize: empty state");
    std::sort(state.branches.begin(), state.branches.end());
    for (std::size_t i = 0; i + 1 < state.branches.size(); ++i) {
        if (state.branches[i].first == state.branches[i + 1].first) {
            throw NotSynthesizableError("canonicalize: duplicate branch");
        }
    }
    const std::uint8_t p0 = state.branches.front().second;
    for (auto& b : state.branches) b.second = static_cast<std::uint8_t>((b.second + 4 - p0) % 4);
    return state;
}

/// Symbolic state from an amplitude vector; all nonzero amplitudes must share
/// one magnitude and carry phases in the {±1, ±i} alphabet.
inline SearchState search_state_from_vector(const VectorXcd& psi, const std::vector<int>& dims,
                                            double tol = 1e-9) {
    SearchState st;
    st.dims = dims;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double a = std::abs(psi(i));
        if (a < tol) continue;
        if (mag < 0.0) {
            mag = a;
        } else if (std::abs(a - mag) > tol) {
            throw NotSynthesizableError("search state requires uniform magnitudes");
        }
        const double ph = std::arg(psi(i));
        const double steps = ph / (0.5 * M_PI);
        const int p = static_cast<int>(std::llround(steps));
        if (std::abs(steps - p) > 1e-6) {
            throw NotSynthesizableError("search state requires phases in {1, i, -1, -i}");
        }
        st.branches.push_back({static_cast<std::int32_t>(i), static_cast<std::uint8_t>((p % 4 + 4) % 4)});
    }
    return canonicalize(std::move(st));
}

inline VectorXcd search_state_to_vector(const SearchState& state) {
    VectorXcd psi = VectorXcd::Zero(total_dim(state.dims));
    const double mag = 1.0 / std::sqrt(static_cast<double>(state.branches.size()));
    const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& b : state.branches) psi(b.first) = mag * i_pow[b.second];
    return psi;
}

/// Gate alphabet of the state-graph search: π subspace-X gates and π
/// two-photon swaps, with per-kind edge costs. `active_sites` (empty = all)
/// restricts the alphabet to the qudits a query actually acts on — the
/// Bell-to-GHZ kernel, for instance, never touches the leftmost qudit.
struct SynthGateSet {
    std::int64_t single_qudit_cost = 1;
    std::int64_t two_qudit_cost = 100;
    std::vector<int> active_sites;

    bool site_allowed(int s) const {
        if (active_sites.empty()) return true;
        return std::find(active_sites.begin(), active_sites.end(), s) != active_sites.end();
    }
};

struct SynthGate {
    GateKind kind;
    int site_a = 0;
    int site_b = 0;  // unused for SubspaceX
    int k = 0;
    int l = 0;  // unused for SubspaceX
    std::int64_t cost = 0;

    GateOp to_op() const {
        if (kind == GateKind::SubspaceX) {
            return GateOp{GateKind::SubspaceX, {site_a}, {k}, M_PI, 0.0};
        }
        return GateOp{GateKind::TwoPhotonSwap, {site_a, site_b}, {k, l}, M_PI, 0.0};
    }
};

// Deterministic enumeration order fixes the lexicographic path tie-break:
// single-qudit X gates first (site, then level), then two-photon swaps
// (pair, then subspace pair).
inline std::vector<SynthGate> enumerate_gates(const std::vector<int>& dims,
                                              const SynthGateSet& gateset) {
    std::vector<SynthGate> gates;
    const int n = static_cast<int>(dims.size());
    for (int s = 0; s < n; ++s) {
        if (!gateset.site_allowed(s)) continue;
        for (int k = 0; k + 1 < dims[s]; ++k) {
            gates.push_back({GateKind::SubspaceX, s, 0, k, 0, gateset.single_qudit_cost});
        }
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (!gateset.site_allowed(a) || !gateset.site_allowed(b)) continue;
            for (int k = 0; k + 1 < dims[a]; ++k) {
                for (int l = 0; l + 1 < dims[b]; ++l) {
                    gates.push_back({GateKind::TwoPhotonSwap, a, b, k, l, gateset.two_qudit_cost});
                }
            }
        }
    }
    return gates;
}

namespace detail {

// π gates act as signed permutations on the ditstring basis, so a uniform
// phase-alphabet state maps to another one (gate-set closure). Returns false
// when the gate acts as the identity on this state.
inline bool apply_synth_gate(const SearchState& in, const SynthGate& g, SearchState& out) {
    out = in;
    std::vector<std::int64_t> strides(in.dims.size());
    std::int64_t acc = 1;
    for (std::size_t s = 0; s < in.dims.size(); ++s) {
        strides[s] = acc;
        acc *= in.dims[s];
    }
    bool changed = false;
    for (auto& br : out.branches) {
        auto digits = index_to_digits(br.first, in.dims);
        if (g.kind == GateKind::SubspaceX) {
            if (digits[g.site_a] == g.k) {
                digits[g.site_a] = g.k + 1;
            } else if (digits[g.site_a] == g.k + 1) {
                digits[g.site_a] = g.k;
            } else {
                continue;
            }
        } else {
            if (digits[g.site_a] == g.k && digits[g.site_b] == g.l) {
                digits[g.site_a] = g.k + 1;
                digits[g.site_b] = g.l + 1;
            } else if (digits[g.site_a] == g.k + 1 && digits[g.site_b] == g.l + 1) {
                digits[g.site_a] = g.k;
                digits[g.site_b] = g.l;
            } else {
                continue;
            }
        }
        br.first = static_cast<std::int32_t>(ditstring_index(digits, in.dims));
        br.second = static_cast<std::uint8_t>((br.second + 1) % 4);  // i per π rotation
        changed = true;
    }
    if (!changed) return false;
    out = canonicalize(std::move(out));
    return true;
}

// Packed key: up to 5 branches of (index < 1024, phase) in 12 bits each,
// branch count in the top bits. The key is a complete encoding of the
// canonical state, so the search never needs to store branch vectors.
inline std::uint64_t state_key(const SearchState& st) {
    if (st.branches.size() > 5) throw NotSynthesizableError("search: more than 5 branches");
    std::uint64_t key = static_cast<std::uint64_t>(st.branches.size()) << 60;
    int shift = 0;
    for (const auto& b : st.branches) {
        if (b.first >= 1024) throw NotSynthesizableError("search: state space too large");
        key |= (static_cast<std::uint64_t>(b.first) << 2 | b.second) << shift;
        shift += 12;
    }
    return key;
}

inline SearchState state_from_key(std::uint64_t key, const std::vector<int>& dims) {
    SearchState st;
    st.dims = dims;
    const std::size_t count = key >> 60;
    int shift = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t packed = (key >> shift) & 0xfffULL;
        st.branches.push_back({static_cast<std::int32_t>(packed >> 2),
                               static_cast<std::uint8_t>(packed & 3)});
        shift += 12;
    }
    return st;
}

}  // namespace detail

struct SynthResult {
    Circuit circuit;
    std::int64_t cost = 0;
    std::size_t expanded = 0;
    int two_qudit_count = 0;
    int single_qudit_count = 0;
    SearchState reached;  // exact branch phases of the final state
};

/// Dijkstra shortest-path synthesis over unparameterized states. Gate costs
/// are non-negative; among equal-cost paths the lexicographically smallest
/// serialized gate sequence wins. With `relaxed_match` the goal test ignores
/// per-branch phases (supports only); the default demands equality up to the
/// canonical global phase.
inline SynthResult dijkstra_synthesize(const SearchState& start_in, const SearchState& target_in,
                                       const SynthGateSet& gateset = {},
                                       std::size_t max_nodes = 5000000,
                                       bool relaxed_match = false) {
    if (start_in.dims.size() > 3) throw Error("dijkstra_synthesize: at most 3 sites");
    if (start_in.dims != target_in.dims) {
        throw ShapeMismatchError("dijkstra_synthesize: dims mismatch");
    }
    const SearchState start = canonicalize(start_in);
    const SearchState target = canonicalize(target_in);
    const auto gates = enumerate_gates(start.dims, gateset);

    auto is_goal = [&](const SearchState& st) {
        if (!relaxed_match) return st.branches == target.branches;
        if (st.branches.size() != target.branches.size()) return false;
        for (std::size_t i = 0; i < st.branches.size(); ++i) {
            if (st.branches[i].first != target.branches[i].first) return false;
        }
        return true;
    };

    struct Node {
        std::int64_t cost;
        std::uint64_t parent;
        std::int16_t gate_id;
    };
    std::unordered_map<std::uint64_t, Node> nodes;
    using QEntry = std::pair<std::int64_t, std::uint64_t>;  // (cost, key)
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> queue;

    const std::uint64_t start_key = detail::state_key(start);
    nodes[start_key] = Node{0, start_key, -1};
    queue.push({0, start_key});

    auto path_of = [&](std::uint64_t key) {
        std::vector<std::int16_t> path;
        while (true) {
            const auto& n = nodes.at(key);
            if (n.gate_id < 0) break;
            path.push_back(n.gate_id);
            key = n.parent;
        }
        std::reverse(path.begin(), path.end());
        return path;
    };

    std::size_t expanded = 0;
    while (!queue.empty()) {
        const auto [cost, key] = queue.top();
        queue.pop();
        auto it = nodes.find(key);
        if (it == nodes.end() || it->second.cost != cost) continue;
        const SearchState current = detail::state_from_key(key, start.dims);

        if (is_goal(current)) {
            SynthResult result;
            result.cost = cost;
            result.expanded = expanded;
            result.reached = current;
            result.circuit.dims = current.dims;
            for (std::int16_t gid : path_of(key)) {
                const auto& g = gates[gid];
                result.circuit.ops.push_back(g.to_op());
                if (g.kind == GateKind::TwoPhotonSwap) {
                    ++result.two_qudit_count;
                } else {
                    ++result.single_qudit_count;
                }
            }
            return result;
        }
        if (++expanded > max_nodes) {
            throw SearchExhaustedError("dijkstra_synthesize: node budget exhausted (frontier " +
                                           std::to_string(queue.size()) + ")",
                                       queue.size());
        }

        for (std::size_t gid = 0; gid < gates.size(); ++gid) {
            SearchState next;
            if (!detail::apply_synth_gate(current, gates[gid], next)) continue;
            const std::uint64_t nkey = detail::state_key(next);
            const std::int64_t ncost = cost + gates[gid].cost;
            auto found = nodes.find(nkey);
            if (found == nodes.end() || ncost < found->second.cost) {
                nodes[nkey] = Node{ncost, key, static_cast<std::int16_t>(gid)};
                queue.push({ncost, nkey});
            } else if (ncost == found->second.cost) {
                // Lexicographic tie-break on the serialized gate sequence.
                auto candidate = path_of(key);
                candidate.push_back(static_cast<std::int16_t>(gid));
                const auto incumbent = path_of(nkey);
                if (candidate < incumbent) {
                    nodes[nkey] = Node{ncost, key, static_cast<std::int16_t>(gid)};
                    queue.push({ncost, nkey});
                }
            }
        }
    }
    throw SearchExhaustedError("dijkstra_synthesize: target unreachable", 0);
}

namespace detail {

inline void push_x(Circuit& c, int site, int k) {
    c.ops.push_back(GateOp{GateKind::SubspaceX, {site}, {k}, M_PI, 0.0});
}
inline void push_tps(Circuit& c, int a, int b, int k, int l, double angle = M_PI) {
    c.ops.push_back(GateOp{GateKind::TwoPhotonSwap, {a, b}, {k, l}, angle, 0.0});
}

// The three-site Bell-to-GHZ kernel, Σ|k,k,0> -> Σ|k,k,k> up to branch
// phases, on sites (a, b, c) of a circuit. Exactly d-1 two-photon swaps.
inline void append_ghz_kernel(Circuit& circuit, int a, int b, int c, int d) {
    if (d == 2) {
        // Two-level case borrows the third level: swap through |2,1> then
        // repair the middle qudit.
        push_tps(circuit, b, c, 1, 0);
        push_x(circuit, b, 1);
        return;
    }
    push_x(circuit, b, d - 3);
    for (int l = 0; l <= d - 4; ++l) {
        push_tps(circuit, b, c, l, l);
        push_x(circuit, c, l);
    }
    push_tps(circuit, b, c, d - 3, d - 3);
    for (int l = 0; l <= d - 4; ++l) push_x(circuit, b, l);
    push_x(circuit, c, d - 2);
    push_x(circuit, c, d - 3);
    push_tps(circuit, b, c, d - 3, d - 3);
    push_x(circuit, c, d - 2);
    (void)a;  // the leftmost qudit is a spectator in the kernel
}

}  // namespace detail

/// Analytic Bell->GHZ kernel on 3 qudits (d-1 two-photon swaps). For d = 2
/// the sites are qutrits (level 2 is used transiently).
inline Circuit ghz_kernel_analytic(int d) {
    if (d < 2 || d > 6) throw Error("ghz_kernel_analytic: d must be in [2, 6]");
    Circuit c;
    const int site_dim = std::max(d, 3);
    c.dims = {site_dim, site_dim, site_dim};
    detail::append_ghz_kernel(c, 0, 1, 2, d);
    return c;
}

/// GHZ_d preparation on n qudits by kernel cycling: Bell_d on (0,1), then a
/// kernel per sliding 3-qudit window. Total two-photon count (n-1)(d-1).
inline Circuit ghz_circuit(int n, int d) {
    if (n < 2) throw Error("ghz_circuit: n must be >= 2");
    if (d < 2 || d > 6) throw Error("ghz_circuit: d must be in [2, 6]");
    Circuit c;
    const int site_dim = std::max(d, 3);
    c.dims.assign(n, site_dim);
    for (int k = 0; k + 1 < d; ++k) {
        const double theta = 2.0 * std::acos(1.0 / std::sqrt(static_cast<double>(d - k)));
        detail::push_tps(c, 0, 1, k, k, theta);
    }
    for (int w = 0; w + 2 < n; ++w) detail::append_ghz_kernel(c, w, w + 1, w + 2, d);
    return c;
}

/// Atomic cat state (|0…0> + e^{iα}|d-1…d-1>)/√2 from |0…0>. n = 2 is the
/// analytic half-swap + π-swap ladder; n = 3 seeds the branch pair with one
/// half swap and finds the rest with the state-graph search (relaxed
/// matching, phases reported by the search itself).
inline Circuit cat_circuit(int n, int d, const SynthGateSet& gateset = {},
                           std::size_t max_nodes = 5000000) {
    if (d < 2 || d > 6) throw Error("cat_circuit: d must be in [2, 6]");
    if (n == 2) {
        Circuit c;
        c.dims = {d, d};
        detail::push_tps(c, 0, 1, 0, 0, M_PI_2);
        for (int k = 1; k + 1 < d; ++k) detail::push_tps(c, 0, 1, k, k, M_PI);
        return c;
    }
    if (n != 3) throw Error("cat_circuit: n > 3 exceeds the search scope");
    const int site_dim = std::max(d, 3);
    const std::vector<int> dims{site_dim, site_dim, site_dim};
    SearchState start;
    start.dims = dims;
    start.branches.push_back({0, 0});
    start.branches.push_back(
        {static_cast<std::int32_t>(ditstring_index({1, 1, 0}, dims)), 1});
    SearchState target;
    target.dims = dims;
    target.branches.push_back({0, 0});
    target.branches.push_back(
        {static_cast<std::int32_t>(ditstring_index({d - 1, d - 1, d - 1}, dims)), 0});
    auto result =
        dijkstra_synthesize(canonicalize(start), canonicalize(target), gateset, max_nodes, true);
    Circuit c;
    c.dims = dims;
    detail::push_tps(c, 0, 1, 0, 0, M_PI_2);
    for (const auto& op : result.circuit.ops) c.ops.push_back(op);
    return c;
}

/// Fidelity of a state against the phase-free GHZ family Σ e^{iφ_k}|k…k>/√d:
/// maximized over the per-branch phases.
inline double ghz_family_fidelity(const QuantumState& state, int d) {
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
        const std::vector<int> digits(state.dims.size(), k);
        const std::int64_t idx = ditstring_index(digits, state.dims);
        acc += std::abs(state.vec(idx));
    }
    return acc * acc / static_cast<double>(d);
}

/// Same for the two-branch cat family (|0…0> + e^{iα}|m…m>)/√2 with m = d-1.
inline double cat_family_fidelity(const QuantumState& state, int d) {
    const std::vector<int> zeros(state.dims.size(), 0);
    const std::vector<int> tops(state.dims.size(), d - 1);
    const double a = std::abs(state.vec(ditstring_index(zeros, state.dims)));
    const double b = std::abs(state.vec(ditstring_index(tops, state.dims)));
    return 0.5 * (a + b) * (a + b);
}

}  // namespace qladder
