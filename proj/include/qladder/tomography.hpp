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
#include "qladder/parallel.hpp"
#include "qladder/readout.hpp"
#include "qladder/rng.hpp"

namespace qladder {

namespace detail {

inline MatrixXcd gell_mann_x(int d, int k, int l) {
    MatrixXcd m = MatrixXcd::Identity(d, d);
    m(k, k) = 0.0;
    m(l, l) = 0.0;
    m(k, l) = 1.0;
    m(l, k) = 1.0;
    return m;
}

inline MatrixXcd gell_mann_y(int d, int k, int l) {
    MatrixXcd m = MatrixXcd::Identity(d, d);
    const Complex i(0.0, 1.0);
    m(k, k) = 0.0;
    m(l, l) = 0.0;
    m(k, l) = i;
    m(l, k) = -i;
    return m;
}

// Principal square root of the embedded two-level Pauli: eigenvalue +1 stays,
// -1 maps to +i. Probability-equivalent to the physical 90-degree pulse.
inline MatrixXcd embedded_sqrt(const MatrixXcd& pauli, int d, int k, int l) {
    MatrixXcd m = MatrixXcd::Identity(d, d);
    const Complex a = 0.5 * Complex(1.0, 1.0);   // (1+i)/2
    const Complex b = 0.5 * Complex(1.0, -1.0);  // (1-i)/2
    m(k, k) = a + b * pauli(k, k);
    m(k, l) = b * pauli(k, l);
    m(l, k) = b * pauli(l, k);
    m(l, l) = a + b * pauli(l, l);
    return m;
}

}  // namespace detail

/// Informationally complete single-qudit pre-measurement set M: computational
/// permutations plus sqrt(X)/sqrt(Y) within each adjacent subspace. For d = 4
/// this is the canonical 16-element list; lower d keep only the elements
/// whose subspace indices fit.
struct ProjectorSet {
    int d = 0;
    std::vector<MatrixXcd> unitaries;
    std::vector<std::string> labels;

    std::size_t size() const { return unitaries.size(); }
};

inline ProjectorSet projector_set(int d) {
    if (d < 2 || d > 4) throw InvalidDimensionError("projector_set: d must be in {2, 3, 4}");
    using detail::embedded_sqrt;
    using detail::gell_mann_x;
    using detail::gell_mann_y;
    // The d = 4 list; each entry is a product of factors with subspace
    // indices (k, k+1). Elements using levels >= d are dropped for smaller d.
    struct Item {
        std::string label;
        int max_level;  // highest level index any factor touches
        MatrixXcd u;
    };
    const int D = d;
    auto X = [&](int k) { return gell_mann_x(D, k, k + 1); };
    auto SX = [&](int k) { return embedded_sqrt(gell_mann_x(D, k, k + 1), D, k, k + 1); };
    auto SY = [&](int k) { return embedded_sqrt(gell_mann_y(D, k, k + 1), D, k, k + 1); };

    // Each label reads in pulse order: the leftmost factor is applied first,
    // so the setting unitary is (last factor)···(first factor). This is the
    // reading that makes the set informationally complete — with the reverse
    // (matrix-product) reading the (1,2) and higher coherences are never
    // probed and the Gram rank stalls below d².
    std::vector<Item> items;
    items.push_back({"I", 1, MatrixXcd::Identity(D, D)});
    items.push_back({"X01", 1, X(0)});
    if (d >= 3) items.push_back({"X12.X01", 2, X(0) * X(1)});
    if (d >= 4) items.push_back({"X23.X12.X01", 3, X(0) * X(1) * X(2)});
    items.push_back({"sX01", 1, SX(0)});
    items.push_back({"sY01", 1, SY(0)});
    if (d >= 3) {
        items.push_back({"sX12.X01", 2, X(0) * SX(1)});
        items.push_back({"sY12.X01", 2, X(0) * SY(1)});
        items.push_back({"X12.sX01", 2, SX(0) * X(1)});
        items.push_back({"X12.sY01", 2, SY(0) * X(1)});
    }
    if (d >= 4) {
        items.push_back({"X23.X12.sX01", 3, SX(0) * X(1) * X(2)});
        items.push_back({"X23.X12.sY01", 3, SY(0) * X(1) * X(2)});
        items.push_back({"X23.sX12.X01", 3, X(0) * SX(1) * X(2)});
        items.push_back({"X23.sY12.X01", 3, X(0) * SY(1) * X(2)});
        items.push_back({"sX23.X12.X01", 3, X(0) * X(1) * SX(2)});
        items.push_back({"sY23.X12.X01", 3, X(0) * X(1) * SY(2)});
    }
    ProjectorSet ps;
    ps.d = d;
    for (auto& item : items) {
        ps.unitaries.push_back(std::move(item.u));
        ps.labels.push_back(item.label);
    }
    return ps;
}

/// Rank of the Gram span of the projector POVM {U† |x><x| U}; equals d² iff
/// the set is informationally complete for d-dimensional density matrices.
inline int projector_gram_rank(const ProjectorSet& ps, double tol = 1e-9) {
    const int d = ps.d;
    Eigen::MatrixXcd rows(static_cast<Eigen::Index>(ps.size()) * d, d * d);
    Eigen::Index r = 0;
    for (const auto& u : ps.unitaries) {
        for (int x = 0; x < d; ++x) {
            const MatrixXcd e = u.adjoint() * VectorXcd::Unit(d, x).asDiagonal() * u;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) rows(r, i * d + j) = e(i, j);
            }
            ++r;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += (sv(i) > tol * sv(0)) ? 1 : 0;
    return rank;
}

/// Joint setting unitaries M^{⊗n} are formed lazily from per-qudit indices.
inline MatrixXcd setting_unitary(const ProjectorSet& ps, const std::vector<int>& setting,
                                 const std::vector<int>& dims) {
    MatrixXcd u = ps.unitaries[setting[0]];
    for (std::size_t q = 1; q < setting.size(); ++q) {
        // Little-endian joint ordering: later qudits are the slower axis.
        const MatrixXcd& v = ps.unitaries[setting[q]];
        MatrixXcd out(u.rows() * v.rows(), u.cols() * v.cols());
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            for (Eigen::Index j = 0; j < v.cols(); ++j) {
                out.block(i * u.rows(), j * u.cols(), u.rows(), u.cols()) = v(i, j) * u;
            }
        }
        u = std::move(out);
    }
    (void)dims;
    return u;
}

/// Measured/simulated counts per projector setting.
struct TomoRecord {
    std::vector<int> dims;
    int n_qudits = 0;
    int d = 0;
    std::int64_t n_rep = 0;
    // settings enumerate per-qudit projector indices little-endian (qudit 0
    // fastest); counts[s][x] over joint ditstrings x.
    std::vector<std::vector<std::int64_t>> counts;
    ConfusionMatrix confusion;
    std::uint64_t seed = 0;
};

inline std::vector<int> setting_digits(std::int64_t s, int n_qudits, int set_size) {
    std::vector<int> digits(n_qudits);
    for (int q = 0; q < n_qudits; ++q) {
        digits[q] = static_cast<int>(s % set_size);
        s /= set_size;
    }
    return digits;
}

/// Sample n_rep shots per joint setting from diag(U ρ U†), corrupted through
/// the confusion channel. Deterministic under the seed.
inline TomoRecord simulate_tomography(const QuantumState& state, const ProjectorSet& ps,
                                      std::int64_t n_rep, const ConfusionMatrix& confusion,
                                      std::uint64_t seed) {
    const auto& dims = state.dims;
    for (int dd : dims) {
        if (dd != ps.d) throw ShapeMismatchError("simulate_tomography: dims must equal ps.d");
    }
    const int n_qudits = static_cast<int>(dims.size());
    const std::int64_t n = total_dim(dims);
    std::int64_t n_settings = 1;
    for (int q = 0; q < n_qudits; ++q) n_settings *= static_cast<std::int64_t>(ps.size());

    const bool ideal_readout = confusion.p.size() == 0 || confusion.is_identity();
    const MatrixXcd rho = state.density_matrix();

    TomoRecord record;
    record.dims = dims;
    record.n_qudits = n_qudits;
    record.d = ps.d;
    record.n_rep = n_rep;
    record.seed = seed;
    record.confusion = confusion.p.size() == 0 ? ConfusionMatrix::identity(dims) : confusion;
    record.counts.assign(n_settings, {});

    Rng base(seed);
    for (std::int64_t s = 0; s < n_settings; ++s) {
        Rng rng = base.derive(static_cast<std::uint64_t>(s));
        const auto sd = setting_digits(s, n_qudits, static_cast<int>(ps.size()));
        const MatrixXcd u = setting_unitary(ps, sd, dims);
        const MatrixXcd rotated = u * rho * u.adjoint();
        std::vector<double> probs(n);
        for (std::int64_t x = 0; x < n; ++x) probs[x] = std::max(0.0, rotated(x, x).real());
        auto counts = rng.multinomial(n_rep, probs);
        if (!ideal_readout) {
            std::vector<std::int64_t> corrupted(n, 0);
            for (std::int64_t x = 0; x < n; ++x) {
                if (counts[x] == 0) continue;
                std::vector<double> row(n);
                for (std::int64_t m = 0; m < n; ++m) row[m] = record.confusion.p(x, m);
                for (std::int64_t k = 0; k < counts[x]; ++k) {
                    corrupted[rng.categorical(row)] += 1;
                }
            }
            counts = std::move(corrupted);
        }
        record.counts[s] = std::move(counts);
    }
    return record;
}

inline nlohmann::json tomo_record_to_json(const TomoRecord& record) {
    nlohmann::json j;
    j["dims"] = record.dims;
    j["d"] = record.d;
    j["n_rep"] = record.n_rep;
    j["seed"] = record.seed;
    j["counts"] = record.counts;
    j["confusion"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < record.confusion.p.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < record.confusion.p.cols(); ++c) {
            row.push_back(record.confusion.p(r, c));
        }
        j["confusion"].push_back(row);
    }
    return j;
}

inline TomoRecord tomo_record_from_json(const nlohmann::json& j) {
    TomoRecord record;
    record.dims = j.at("dims").get<std::vector<int>>();
    record.n_qudits = static_cast<int>(record.dims.size());
    record.d = j.at("d").get<int>();
    record.n_rep = j.at("n_rep").get<std::int64_t>();
    record.seed = j.at("seed").get<std::uint64_t>();
    record.counts = j.at("counts").get<std::vector<std::vector<std::int64_t>>>();
    const auto& jc = j.at("confusion");
    const Eigen::Index n = static_cast<Eigen::Index>(jc.size());
    record.confusion.dims = record.dims;
    record.confusion.p.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) record.confusion.p(r, c) = jc[r][c].get<double>();
    }
    return record;
}

/// Confusion-inverted frequency vectors per setting (entries may dip below
/// zero; they are passed to the estimator as-is).
inline std::vector<Eigen::VectorXd> invert_confusion(const TomoRecord& record) {
    const std::int64_t n = total_dim(record.dims);
    const Eigen::MatrixXd& c = record.confusion.p;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c.transpose());
    if (!lu.isInvertible()) throw SingularMatrixError("invert_confusion: singular confusion matrix");
    std::vector<Eigen::VectorXd> out;
    out.reserve(record.counts.size());
    for (const auto& counts : record.counts) {
        Eigen::VectorXd q(n);
        for (std::int64_t x = 0; x < n; ++x) {
            q(x) = static_cast<double>(counts[x]) / static_cast<double>(record.n_rep);
        }
        out.push_back(lu.solve(q));
    }
    return out;
}

/// Stopping: with gain_tolerance > 0 the iteration exits once the
/// log-likelihood gain falls below it (the fast path for sampled data). A
/// positive grad_tolerance instead demands true stationarity,
/// max |P(R−I)P| < tol on the support — the sound criterion when the record
/// holds exact probabilities and the likelihood gain drowns in rounding
/// noise long before the state has converged.
struct MleOptions {
    int max_iterations = 5000;
    double dilution = 0.5;          // R ← (1-η)I + ηR
    double gain_tolerance = 1e-10;  // log-likelihood flatness exit (0 = off)
    double grad_tolerance = 0.0;    // support-projected gradient exit (0 = off)
};

struct MleResult {
    MatrixXcd rho;
    int iterations = 0;
    bool converged = false;
    double final_gradient = 0.0;  // max |P(R-I)P| on the support at exit
    double log_likelihood = 0.0;
};

/// Diluted RρR maximum-likelihood reconstruction from confusion-corrected
/// frequencies. Deterministic from the record.
inline MleResult mle_reconstruct(const TomoRecord& record, const ProjectorSet& ps,
                                 const MleOptions& options = {}) {
    const auto& dims = record.dims;
    const std::int64_t n = total_dim(dims);
    const std::int64_t n_settings = static_cast<std::int64_t>(record.counts.size());

    // Informational completeness gate: every setting present with counts.
    {
        std::int64_t expected = 1;
        for (int q = 0; q < record.n_qudits; ++q) expected *= static_cast<std::int64_t>(ps.size());
        if (n_settings != expected) {
            throw NotInformationallyCompleteError("mle_reconstruct: missing settings in record");
        }
        if (projector_gram_rank(ps) < ps.d * ps.d) {
            throw NotInformationallyCompleteError("mle_reconstruct: projector set not IC");
        }
    }

    const auto freqs = invert_confusion(record);
    std::vector<MatrixXcd> setting_us(n_settings);
    for (std::int64_t s = 0; s < n_settings; ++s) {
        setting_us[s] =
            setting_unitary(ps, setting_digits(s, record.n_qudits, static_cast<int>(ps.size())), dims);
    }

    MatrixXcd rho = MatrixXcd::Identity(n, n) / static_cast<double>(n);
    const double inv_settings = 1.0 / static_cast<double>(n_settings);
    double prev_ll = -1e300;
    MleResult result;

    auto support_gradient = [&](const MatrixXcd& rho_now, const MatrixXcd& r_now) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho_now);
        MatrixXcd p_support = MatrixXcd::Zero(n, n);
        for (std::int64_t i = 0; i < n; ++i) {
            if (es.eigenvalues()(i) > 1e-12) {
                p_support.noalias() +=
                    es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
            }
        }
        const MatrixXcd grad = p_support * (r_now - MatrixXcd::Identity(n, n)) * p_support;
        return grad.cwiseAbs().maxCoeff();
    };

    MatrixXcd r(n, n), rotated(n, n), scaled(n, n);
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        r.setZero();
        double ll = 0.0;
        for (std::int64_t s = 0; s < n_settings; ++s) {
            const MatrixXcd& u = setting_us[s];
            rotated.noalias() = u * rho;
            // p_x = <x|UρU†|x>
            VectorXcd diag(n);
            for (std::int64_t x = 0; x < n; ++x) diag(x) = u.row(x).dot(rotated.row(x));
            Eigen::VectorXd w(n);
            for (std::int64_t x = 0; x < n; ++x) {
                const double p = std::max(diag(x).real(), 1e-15);
                const double f = freqs[s](x);
                w(x) = f / p;
                if (f > 0.0) ll += f * std::log(p);
            }
            scaled.noalias() = w.asDiagonal() * u;
            r.noalias() += u.adjoint() * scaled;
        }
        r *= inv_settings;

        const double gain = ll - prev_ll;
        prev_ll = ll;
        result.iterations = iter;
        result.log_likelihood = ll;
        bool stop = false;
        if (options.grad_tolerance > 0.0) {
            result.final_gradient = support_gradient(rho, r);
            stop = result.final_gradient < options.grad_tolerance;
        } else if (options.gain_tolerance > 0.0) {
            stop = iter > 1 && std::abs(gain) < options.gain_tolerance;
        }
        if (stop) {
            result.converged = true;
            break;
        }

        const MatrixXcd r_diluted = (1.0 - options.dilution) * MatrixXcd::Identity(n, n) +
                                    options.dilution * r;
        rho = r_diluted * rho * r_diluted;
        rho = 0.5 * (rho + rho.adjoint()).eval();
        rho /= rho.trace().real();
    }
    if (!result.converged && options.grad_tolerance == 0.0) {
        // Report the stationarity measure for the non-convergence warning.
        result.final_gradient = support_gradient(rho, r);
    }
    result.rho = std::move(rho);
    return result;
}

/// State fidelity Tr(√ρ σ √ρ); for pure σ this is <ψ|ρ|ψ>. The uhlmann flag
/// selects (Tr √(√ρ σ √ρ))² instead (for mixed σ comparisons).
inline double fidelity(const MatrixXcd& rho, const MatrixXcd& sigma, bool uhlmann = false) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-8) {
        throw NonPhysicalStateError("fidelity: rho has negative eigenvalues");
    }
    VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    const MatrixXcd sqrt_rho = es.eigenvectors() * clipped.cwiseSqrt().asDiagonal() *
                               es.eigenvectors().adjoint();
    const MatrixXcd inner = sqrt_rho * sigma * sqrt_rho;
    if (!uhlmann) return inner.trace().real();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es2(inner);
    const double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

inline double fidelity_to_pure(const MatrixXcd& rho, const VectorXcd& psi) {
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

/// McWeeny purification ρ ← 3ρ² − 2ρ³ (trace-renormalized) to the projector
/// onto the dominant eigenvector. Requires a unique top eigenvalue.
inline MatrixXcd mcweeny_purify(const MatrixXcd& rho_in, int max_iterations = 200,
                               double tolerance = 1e-10) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho_in);
    const auto& ev = es.eigenvalues();
    const std::int64_t n = rho_in.rows();
    if (n >= 2 && ev(n - 1) - ev(n - 2) < 1e-8) {
        throw AmbiguousPurificationError("mcweeny_purify: degenerate top eigenvalue");
    }
    MatrixXcd rho = rho_in;
    for (int iter = 0; iter < max_iterations; ++iter) {
        const MatrixXcd rho2 = rho * rho;
        if ((rho2 - rho).cwiseAbs().maxCoeff() < tolerance) return rho;
        rho = 3.0 * rho2 - 2.0 * rho2 * rho;
        rho = 0.5 * (rho + rho.adjoint()).eval();
        rho /= rho.trace().real();
    }
    return rho;
}

/// Single-qudit Hermitian operator basis, unitary-normalized so that
/// Tr(B_i B_j) = d·δ_ij with O(1) eigenvalues: identity, scaled X/Y pairs,
/// and scaled traceless diagonals.
inline std::vector<MatrixXcd> hermitian_operator_basis(int d) {
    std::vector<MatrixXcd> basis;
    basis.push_back(MatrixXcd::Identity(d, d));
    const double s = std::sqrt(0.5 * d);
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            MatrixXcd x = MatrixXcd::Zero(d, d), y = MatrixXcd::Zero(d, d);
            x(k, l) = s;
            x(l, k) = s;
            y(k, l) = Complex(0.0, -s);
            y(l, k) = Complex(0.0, s);
            basis.push_back(std::move(x));
            basis.push_back(std::move(y));
        }
    }
    for (int l = 1; l < d; ++l) {
        MatrixXcd z = MatrixXcd::Zero(d, d);
        const double scale = std::sqrt(static_cast<double>(d) / (static_cast<double>(l) * (l + 1)));
        for (int k = 0; k < l; ++k) z(k, k) = scale;
        z(l, l) = -scale * static_cast<double>(l);
        basis.push_back(std::move(z));
    }
    return basis;
}

/// Trace-preserving projection onto the physical (PSD, trace-1) set:
/// eigenvalues shifted by the water level μ solving Σ max(λ−μ, 0) = 1.
inline MatrixXcd project_to_physical(const MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho + rho.adjoint()));
    Eigen::VectorXd lam = es.eigenvalues();
    double lo = lam.minCoeff() - 1.0, hi = lam.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mu = 0.5 * (lo + hi);
        double total = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i) total += std::max(lam(i) - mu, 0.0);
        (total > 1.0 ? lo : hi) = mu;
    }
    const double mu = 0.5 * (lo + hi);
    Eigen::VectorXd clipped(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) clipped(i) = std::max(lam(i) - mu, 0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

struct ShotNoiseStats {
    double mean = 0.0;
    double std_dev = 0.0;
    std::vector<double> fidelities;
};

/// Shot-noise Monte Carlo over `trials` independent repetitions with derived
/// per-trial seeds; the reduction is index-ordered so the statistics are
/// bit-stable for any thread count.
///
/// Each trial measures every operator of the tensor-product Hermitian basis
/// with n_rep shots — central-limit Gaussian noise with the operator's true
/// single-shot variance — and reconstructs by the constrained Gaussian
/// maximum-likelihood estimate: least squares in the orthogonal basis
/// followed by the trace-preserving projection onto the physical set.
inline ShotNoiseStats shot_noise_mc(const QuantumState& target, const ProjectorSet& ps,
                                    std::int64_t n_rep, int trials, std::uint64_t seed,
                                    int threads = 0) {
    if (trials < 10) throw Error("shot_noise_mc: trials >= 10 required");
    target.validate();
    const int d = ps.d;
    for (int dd : target.dims) {
        if (dd != d) throw ShapeMismatchError("shot_noise_mc: dims must match the projector set");
    }
    const int n_qudits = static_cast<int>(target.dims.size());
    const std::int64_t dim = total_dim(target.dims);

    const auto single = hermitian_operator_basis(d);
    std::size_t n_ops = 1;
    for (int q = 0; q < n_qudits; ++q) n_ops *= single.size();
    std::vector<MatrixXcd> basis;
    basis.reserve(n_ops);
    for (std::size_t t = 0; t < n_ops; ++t) {
        std::size_t rem = t;
        MatrixXcd m = MatrixXcd::Identity(1, 1);
        for (int q = 0; q < n_qudits; ++q) {
            const MatrixXcd& f = single[rem % single.size()];
            rem /= single.size();
            MatrixXcd next(m.rows() * d, m.cols() * d);
            for (int r = 0; r < d; ++r) {
                for (int c = 0; c < d; ++c) {
                    next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = f(r, c) * m;
                }
            }
            m = std::move(next);
        }
        basis.push_back(std::move(m));
    }
    const MatrixXcd rho_true = target.density_matrix();
    std::vector<double> coeff(n_ops), sigma(n_ops);
    for (std::size_t i = 0; i < n_ops; ++i) {
        coeff[i] = (rho_true * basis[i]).trace().real();
        const double second = (rho_true * basis[i] * basis[i]).trace().real();
        sigma[i] = std::sqrt(std::max(0.0, second - coeff[i] * coeff[i]) /
                             static_cast<double>(n_rep));
    }

    std::vector<double> fids(trials, 0.0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        Rng rng = Rng(seed).derive(t);
        MatrixXcd rho = MatrixXcd::Zero(dim, dim);
        for (std::size_t i = 0; i < n_ops; ++i) {
            double c = coeff[i];
            if (i > 0) c += sigma[i] * rng.normal();  // identity stays exact
            rho += (c / static_cast<double>(dim)) * basis[i];
        }
        fids[t] = fidelity_to_pure(project_to_physical(rho), target.vec);
    });

    ShotNoiseStats stats;
    stats.fidelities = fids;
    for (double f : fids) stats.mean += f;
    stats.mean /= static_cast<double>(trials);
    for (double f : fids) stats.std_dev += (f - stats.mean) * (f - stats.mean);
    stats.std_dev = std::sqrt(stats.std_dev / static_cast<double>(trials - 1));
    return stats;
}

}  // namespace qladder
