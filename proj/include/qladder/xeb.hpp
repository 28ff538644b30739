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
#include <vector>

#include "qladder/errors.hpp"
#include "qladder/model.hpp"
#include "qladder/parallel.hpp"
#include "qladder/rng.hpp"

namespace qladder {

/// Linear cross-entropy H(p1, p2) = Σ_x p1(x) p2(x).
inline double linear_cross_entropy(const std::vector<double>& p1, const std::vector<double>& p2) {
    if (p1.size() != p2.size()) throw ShapeMismatchError("linear_cross_entropy: size mismatch");
    double h = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) h += p1[i] * p2[i];
    return h;
}

/// XEB fidelity F = (H(p,q) − H(p,u)) / (H(p,p) − H(p,u)) with u uniform.
inline double xeb_fidelity(const std::vector<double>& p, const std::vector<double>& q) {
    const double u = 1.0 / static_cast<double>(p.size());
    const double hpp = linear_cross_entropy(p, p);
    const double hpu = u;
    if (std::abs(hpp - hpu) < 1e-15) {
        throw UndefinedFidelityError("xeb_fidelity: ideal distribution is uniform");
    }
    return (linear_cross_entropy(p, q) - hpu) / (hpp - hpu);
}

struct XebRun {
    std::vector<int> depths;
    // per depth, per circuit: ideal p and sampled q̂
    std::vector<std::vector<std::vector<double>>> ideal;
    std::vector<std::vector<std::vector<double>>> measured;
    std::vector<std::vector<double>> fidelities;  // per depth, per circuit
    std::vector<double> mean_fidelity;            // per depth
    double fit_amplitude = 0.0;
    double fit_per_cycle = 0.0;
};

namespace detail {

// Haar-random SU(2), embedded in the 0-1 subspace of a d-level site.
inline Eigen::Matrix2cd haar_su2(Rng& rng) {
    // Ginibre + QR with positive diagonal, normalized to det 1.
    Eigen::Matrix2cd g;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) g(r, c) = rng.normal_complex();
    }
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    Eigen::Matrix2cd q = qr.householderQ();
    Eigen::Matrix2cd rmat = q.adjoint() * g;
    for (int i = 0; i < 2; ++i) {
        const Complex ph = rmat(i, i) / std::abs(rmat(i, i));
        q.col(i) *= ph;
    }
    const Complex det = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
    return q / std::sqrt(det);
}

}  // namespace detail

struct XebConfig {
    std::vector<int> depths{1, 2, 4, 8, 16};
    int circuits_per_depth = 30;
    double depol_rate = 0.0;
    std::int64_t shots = 100000;
    std::uint64_t seed = 1;
    int threads = 0;
};

/// Randomized-cycle XEB under a global depolarizing model: each cycle is a
/// layer of Haar SU(2) rotations (0-1 subspaces) followed by the dressed
/// unitary; the measured distribution is the ideal one contracted toward
/// uniform by (1-r) per cycle, then multinomially sampled.
inline XebRun simulate_xeb(const MatrixXcd& dressed_unitary, const std::vector<int>& dims,
                           const XebConfig& cfg) {
    if (cfg.depol_rate < 0.0 || cfg.depol_rate > 1.0) {
        throw Error("simulate_xeb: depol_rate must lie in [0, 1]");
    }
    const std::int64_t n = total_dim(dims);
    if (dressed_unitary.rows() != n || dressed_unitary.cols() != n) {
        throw ShapeMismatchError("simulate_xeb: unitary does not match dims");
    }
    XebRun run;
    run.depths = cfg.depths;
    run.ideal.resize(cfg.depths.size());
    run.measured.resize(cfg.depths.size());
    run.fidelities.resize(cfg.depths.size());
    for (std::size_t di = 0; di < cfg.depths.size(); ++di) {
        run.ideal[di].resize(cfg.circuits_per_depth);
        run.measured[di].resize(cfg.circuits_per_depth);
        run.fidelities[di].resize(cfg.circuits_per_depth);
    }

    const std::size_t total = cfg.depths.size() * static_cast<std::size_t>(cfg.circuits_per_depth);
    parallel_for(total, cfg.threads, [&](std::size_t job) {
        const std::size_t di = job / cfg.circuits_per_depth;
        const std::size_t ci = job % cfg.circuits_per_depth;
        const int depth = cfg.depths[di];
        Rng rng = Rng(cfg.seed).derive(job);

        VectorXcd psi = VectorXcd::Zero(n);
        psi(0) = 1.0;
        for (int cycle = 0; cycle < depth; ++cycle) {
            for (std::size_t q = 0; q < dims.size(); ++q) {
                const Eigen::Matrix2cd u2 = detail::haar_su2(rng);
                MatrixXcd local = MatrixXcd::Identity(dims[q], dims[q]);
                local(0, 0) = u2(0, 0);
                local(0, 1) = u2(0, 1);
                local(1, 0) = u2(1, 0);
                local(1, 1) = u2(1, 1);
                psi = embed_operator(local, static_cast<int>(q), dims) * psi;
            }
            psi = dressed_unitary * psi;
        }
        std::vector<double> p(n);
        for (std::int64_t x = 0; x < n; ++x) p[x] = std::norm(psi(x));

        const double survive = std::pow(1.0 - cfg.depol_rate, depth);
        std::vector<double> q_true(n);
        for (std::int64_t x = 0; x < n; ++x) {
            q_true[x] = survive * p[x] + (1.0 - survive) / static_cast<double>(n);
        }
        std::vector<double> q_hat(n, 0.0);
        const auto counts = rng.multinomial(cfg.shots, q_true);
        for (std::int64_t x = 0; x < n; ++x) {
            q_hat[x] = static_cast<double>(counts[x]) / static_cast<double>(cfg.shots);
        }
        run.fidelities[di][ci] = xeb_fidelity(p, q_hat);
        run.ideal[di][ci] = std::move(p);
        run.measured[di][ci] = std::move(q_hat);
    });

    run.mean_fidelity.resize(cfg.depths.size());
    for (std::size_t di = 0; di < cfg.depths.size(); ++di) {
        double acc = 0.0;
        for (double f : run.fidelities[di]) acc += f;
        run.mean_fidelity[di] = acc / static_cast<double>(cfg.circuits_per_depth);
    }
    return run;
}

struct DecayFit {
    double amplitude = 0.0;      // A
    double per_cycle = 0.0;      // f
    double amplitude_err = 0.0;  // standard errors
    double per_cycle_err = 0.0;
    int points_used = 0;
    int points_dropped = 0;  // non-positive fidelities excluded
};

/// Least-squares fit of F(m) = A·f^m on log-transformed positive values.
/// Additive noise on F is heteroscedastic in log space (σ_log ≈ σ/F), so an
/// unweighted pass seeds a variance-weighted refinement with w ∝ F(m)².
inline DecayFit fit_decay(const std::vector<int>& depths, const std::vector<double>& fidelities) {
    if (depths.size() != fidelities.size()) throw ShapeMismatchError("fit_decay: size mismatch");
    if (depths.size() < 3) throw UnfittableError("fit_decay: need at least 3 depths");
    std::vector<double> xs, ys;
    int dropped = 0;
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (fidelities[i] > 0.0) {
            xs.push_back(static_cast<double>(depths[i]));
            ys.push_back(std::log(fidelities[i]));
        } else {
            ++dropped;
        }
    }
    if (xs.size() < 2) throw UnfittableError("fit_decay: no positive fidelities to fit");
    const double nn = static_cast<double>(xs.size());

    double slope = 0.0, intercept = 0.0, var_slope = 0.0, var_intercept = 0.0;
    std::vector<double> w(xs.size(), 1.0);
    for (int pass = 0; pass < 2; ++pass) {
        double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sw += w[i];
            sx += w[i] * xs[i];
            sy += w[i] * ys[i];
            sxx += w[i] * xs[i] * xs[i];
            sxy += w[i] * xs[i] * ys[i];
        }
        const double denom = sw * sxx - sx * sx;
        if (std::abs(denom) < 1e-15) throw UnfittableError("fit_decay: degenerate depth set");
        slope = (sw * sxy - sx * sy) / denom;
        intercept = (sy - slope * sx) / sw;
        double chi2 = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (intercept + slope * xs[i]);
            chi2 += w[i] * r * r;
        }
        const double dof = std::max(1.0, nn - 2.0);
        const double scale = chi2 / dof;
        var_slope = scale * sw / denom;
        var_intercept = scale * sxx / denom;
        // Reweight by the predicted fidelities for the second pass.
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double pred = std::exp(intercept + slope * xs[i]);
            w[i] = pred * pred;
        }
    }

    DecayFit fit;
    fit.per_cycle = std::exp(slope);
    fit.amplitude = std::exp(intercept);
    fit.per_cycle_err = fit.per_cycle * std::sqrt(var_slope);
    fit.amplitude_err = fit.amplitude * std::sqrt(var_intercept);
    fit.points_used = static_cast<int>(xs.size());
    fit.points_dropped = dropped;
    return fit;
}

}  // namespace qladder
