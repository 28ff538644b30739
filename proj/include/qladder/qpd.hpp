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
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qladder/errors.hpp"
#include "qladder/model.hpp"

namespace qladder {

/// Real-valued field sampled on the (θ, φ) sphere; θ row-major over
/// [0, π] x [0, 2π).
struct SphereGrid {
    int n_theta = 0;
    int n_phi = 0;
    std::vector<double> thetas;
    std::vector<double> phis;
    std::vector<double> values;  // n_theta * n_phi, θ-major

    double& at(int it, int ip) { return values[static_cast<std::size_t>(it) * n_phi + ip]; }
    double at(int it, int ip) const { return values[static_cast<std::size_t>(it) * n_phi + ip]; }

    static SphereGrid make(int n_theta, int n_phi) {
        if (n_theta < 16 || n_phi < 16) throw Error("SphereGrid: grid sizes >= 16");
        SphereGrid g;
        g.n_theta = n_theta;
        g.n_phi = n_phi;
        g.thetas.resize(n_theta);
        g.phis.resize(n_phi);
        // θ at cell centers keeps the poles single-valued and the quadrature
        // weights simple; φ covers [0, 2π).
        for (int i = 0; i < n_theta; ++i) {
            g.thetas[i] = M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(n_theta);
        }
        for (int i = 0; i < n_phi; ++i) {
            g.phis[i] = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n_phi);
        }
        g.values.assign(static_cast<std::size_t>(n_theta) * n_phi, 0.0);
        return g;
    }
};

namespace detail {

// Spin operators in the |j, m> basis ordered m = j, j-1, ..., -j so that the
// qudit level |k> maps to m = j - k (|0> is the north pole).
inline MatrixXcd spin_lowering(int d) {
    const double j = 0.5 * static_cast<double>(d - 1);
    MatrixXcd jm = MatrixXcd::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) {
        const double m = j - static_cast<double>(k);
        // J-|j,m> = sqrt(j(j+1) - m(m-1)) |j,m-1>
        jm(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m - 1.0));
    }
    return jm;
}

// U(θ, φ) = exp[(θ/2)(e^{iφ} J- − e^{-iφ} J+)], the rotation taking |0> to
// the spin coherent state at (θ, φ).
inline MatrixXcd scs_rotation(int d, double theta, double phi) {
    const MatrixXcd jm = spin_lowering(d);
    const MatrixXcd jp = jm.adjoint();
    const Complex eip = std::exp(Complex(0.0, phi));
    const MatrixXcd g = 0.5 * theta * (eip * jm - std::conj(eip) * jp);
    // g is anti-Hermitian; exponentiate through the Hermitian matrix i·g.
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Complex(0.0, 1.0) * g);
    VectorXcd phase(d);
    for (int k = 0; k < d; ++k) phase(k) = std::exp(Complex(0.0, -es.eigenvalues()(k)));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// SU(2) rotation U(θ, φ) mapping |0> to the spin coherent state at (θ, φ).
inline MatrixXcd scs_rotation(int d, double theta, double phi) {
    if (d < 2) throw InvalidDimensionError("scs_rotation: d >= 2");
    return detail::scs_rotation(d, theta, phi);
}

/// Spin coherent state |θ, φ> of a d-level qudit (exact exponentiation).
inline VectorXcd spin_coherent_state(double theta, double phi, int d) {
    if (d < 2) throw InvalidDimensionError("spin_coherent_state: d >= 2");
    return detail::scs_rotation(d, theta, phi).col(0);
}

/// Stratonovich–Weyl parity kernel of a spin j = (d-1)/2: the diagonal
/// operator Σ_m Δ_m |j,m><j,m| fixed by the trace conditions. Solved per d
/// from an orthonormal diagonal multipole basis; the spin-1/2 closed form
/// diag((1±√3)/2) is the regression oracle.
inline VectorXd wigner_kernel_weights(int d) {
    // Orthonormal diagonal basis T_l (Gram-Schmidt over powers of m) with the
    // sign convention (T_l)_{m=j} > 0.
    Eigen::MatrixXd basis(d, d);
    for (int l = 0; l < d; ++l) {
        Eigen::VectorXd v(d);
        for (int k = 0; k < d; ++k) {
            const double m = 0.5 * static_cast<double>(d - 1) - static_cast<double>(k);
            v(k) = std::pow(m, l);
        }
        for (int p = 0; p < l; ++p) v -= basis.col(p).dot(v) * basis.col(p);
        const double nrm = v.norm();
        if (nrm < 1e-12) throw KernelSolveError("wigner_kernel_weights: degenerate basis");
        v /= nrm;
        if (v(0) < 0.0) v = -v;
        basis.col(l) = v;
    }
    VectorXd delta = VectorXd::Zero(d);
    for (int l = 0; l < d; ++l) {
        const double a_l = std::sqrt(static_cast<double>(2 * l + 1) / static_cast<double>(d));
        delta += a_l * basis.col(l);
    }
    return delta;
}

/// Husimi-Q on the equal-angle slice, Q(θ,φ) ∝ <θφ|^{⊗n} ρ |θφ>^{⊗n},
/// normalized so the maximum is 1.
inline SphereGrid husimi_q(const QuantumState& state, int n_theta, int n_phi) {
    for (std::size_t q = 1; q < state.dims.size(); ++q) {
        if (state.dims[q] != state.dims[0]) throw ShapeMismatchError("husimi_q: mixed dims");
    }
    const int d = state.dims[0];
    const int n = static_cast<int>(state.dims.size());
    SphereGrid grid = SphereGrid::make(n_theta, n_phi);
    const MatrixXcd rho = state.density_matrix();
    for (int it = 0; it < n_theta; ++it) {
        for (int ip = 0; ip < n_phi; ++ip) {
            const VectorXcd scs = spin_coherent_state(grid.thetas[it], grid.phis[ip], d);
            VectorXcd joint = scs;
            for (int q = 1; q < n; ++q) {
                VectorXcd next(joint.size() * d);
                for (int k = 0; k < d; ++k) next.segment(k * joint.size(), joint.size()) = scs(k) * joint;
                joint = std::move(next);
            }
            grid.at(it, ip) = (joint.adjoint() * rho * joint)(0, 0).real();
        }
    }
    double vmax = 0.0;
    for (double v : grid.values) vmax = std::max(vmax, v);
    if (vmax > 0.0) {
        for (double& v : grid.values) v /= vmax;
    }
    return grid;
}

/// Tensor-product SU(d) Wigner function
///   W(θ,φ) = Tr[U^{⊗n} ρ U†^{⊗n} Π^{⊗n}]
/// with U the spin-coherent rotation and Π the Stratonovich–Weyl kernel.
/// Values are returned raw (no normalization).
inline SphereGrid wigner(const QuantumState& state, int n_theta, int n_phi) {
    for (std::size_t q = 1; q < state.dims.size(); ++q) {
        if (state.dims[q] != state.dims[0]) throw ShapeMismatchError("wigner: mixed dims");
    }
    const int d = state.dims[0];
    const int n = static_cast<int>(state.dims.size());
    const VectorXd delta = wigner_kernel_weights(d);
    SphereGrid grid = SphereGrid::make(n_theta, n_phi);
    const MatrixXcd rho = state.density_matrix();
    for (int it = 0; it < n_theta; ++it) {
        for (int ip = 0; ip < n_phi; ++ip) {
            const MatrixXcd u = detail::scs_rotation(d, grid.thetas[it], grid.phis[ip]);
            // K = U† Π U per qudit; W = Tr[ρ K^{⊗n}] by index contraction.
            const MatrixXcd k1 = u.adjoint() * delta.cast<Complex>().asDiagonal() * u;
            MatrixXcd kn = k1;
            for (int q = 1; q < n; ++q) {
                MatrixXcd next(kn.rows() * d, kn.cols() * d);
                for (int r = 0; r < d; ++r) {
                    for (int c = 0; c < d; ++c) {
                        next.block(r * kn.rows(), c * kn.cols(), kn.rows(), kn.cols()) =
                            k1(r, c) * kn;
                    }
                }
                kn = std::move(next);
            }
            grid.at(it, ip) = (rho * kn).trace().real();
        }
    }
    return grid;
}

/// CSV export (theta, phi, value) with 9-significant-digit formatting.
inline void export_grid(const SphereGrid& grid, const std::string& path) {
    if (grid.values.empty()) throw Error("export_grid: empty grid");
    std::ofstream os(path);
    if (!os) throw IoError("export_grid: cannot open " + path);
    os << "theta,phi,value\n";
    char buf[96];
    for (int it = 0; it < grid.n_theta; ++it) {
        for (int ip = 0; ip < grid.n_phi; ++ip) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", grid.thetas[it], grid.phis[ip],
                          grid.at(it, ip));
            os << buf;
        }
    }
    if (!os) throw IoError("export_grid: write failed for " + path);
}

/// Q-weighted inertia axis with the smallest eigenvalue: the normal of the
/// great circle along which a squeezed distribution extends.
inline Eigen::Vector3d squeezing_normal(const SphereGrid& grid) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int it = 0; it < grid.n_theta; ++it) {
        const double st = std::sin(grid.thetas[it]);
        const double ct = std::cos(grid.thetas[it]);
        for (int ip = 0; ip < grid.n_phi; ++ip) {
            const Eigen::Vector3d r(st * std::cos(grid.phis[ip]), st * std::sin(grid.phis[ip]), ct);
            m += grid.at(it, ip) * st * r * r.transpose();
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    return es.eigenvectors().col(0);
}

}  // namespace qladder
