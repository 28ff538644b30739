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
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "qladder/errors.hpp"
#include "qladder/model.hpp"
#include "qladder/rng.hpp"

namespace qladder {

/// Dispersive readout model of one qudit: the resonator is pulled by
/// dispersive_shifts[k] (rad/s relative to resonator_freq) when the qudit is
/// in |k>, probed at probe_freq. IQ blobs are circular Gaussians whose width
/// is the minimal centroid separation divided by snr.
struct ReadoutModel {
    double resonator_freq = 0.0;
    double linewidth = 0.0;
    std::vector<double> dispersive_shifts;
    double probe_freq = 0.0;
    double snr = 5.0;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(dispersive_shifts.size()); }

    void validate() const {
        if (!(linewidth > 0.0)) throw Error("ReadoutModel: linewidth must be > 0");
        if (dispersive_shifts.size() < 2) throw Error("ReadoutModel: need shifts for d >= 2 levels");
        if (!(snr > 0.0)) throw Error("ReadoutModel: snr must be > 0");
    }
};

/// Level-resolved dispersive shifts from per-level couplings and detunings:
/// χ_k = g_k²/Δ_kr, and the resonator pulled by χ_k − χ_{k−1} in |k>.
inline std::vector<double> dispersive_shifts_from_couplings(const std::vector<double>& g,
                                                            const std::vector<double>& delta) {
    if (g.size() != delta.size()) throw ShapeMismatchError("dispersive shifts: size mismatch");
    std::vector<double> shifts(g.size());
    double chi_prev = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (delta[k] == 0.0) throw SingularityError("dispersive shifts: zero detuning");
        const double chi = g[k] * g[k] / delta[k];
        shifts[k] = chi - chi_prev;
        chi_prev = chi;
    }
    return shifts;
}

/// Lorentzian transmission at the probe frequency for the level-k pulled
/// resonator: S = (κ/2) / (i(ω_p − ω_k) + κ/2), unit magnitude on resonance.
inline Complex resonator_response(const ReadoutModel& model, int level) {
    model.validate();
    if (level < 0 || level >= model.dim()) throw InvalidDimensionError("resonator_response: level");
    const double pulled = model.resonator_freq + model.dispersive_shifts[level];
    const double hk = 0.5 * model.linewidth;
    return Complex(hk, 0.0) / Complex(hk, model.probe_freq - pulled);
}

inline std::vector<Complex> iq_centroids(const ReadoutModel& model) {
    std::vector<Complex> c(model.dim());
    for (int k = 0; k < model.dim(); ++k) c[k] = resonator_response(model, k);
    return c;
}

inline double min_centroid_separation(const std::vector<Complex>& centroids) {
    double sep = 1e300;
    for (std::size_t i = 0; i < centroids.size(); ++i) {
        for (std::size_t j = i + 1; j < centroids.size(); ++j) {
            sep = std::min(sep, std::abs(centroids[i] - centroids[j]));
        }
    }
    return sep;
}

/// Row-stochastic map P(measured | prepared) over joint ditstrings.
struct ConfusionMatrix {
    std::vector<int> dims;
    Eigen::MatrixXd p;  // rows: prepared, cols: measured
    double condition_number = 1.0;
    bool singular = false;

    void validate() const {
        for (Eigen::Index r = 0; r < p.rows(); ++r) {
            double row = 0.0;
            for (Eigen::Index c = 0; c < p.cols(); ++c) {
                if (p(r, c) < -1e-12 || p(r, c) > 1.0 + 1e-12) {
                    throw Error("ConfusionMatrix: entry outside [0, 1]");
                }
                row += p(r, c);
            }
            if (std::abs(row - 1.0) > 1e-9) throw Error("ConfusionMatrix: row sum != 1");
        }
    }

    static ConfusionMatrix identity(const std::vector<int>& dims) {
        ConfusionMatrix c;
        c.dims = dims;
        const auto n = total_dim(dims);
        c.p = Eigen::MatrixXd::Identity(n, n);
        return c;
    }

    bool is_identity() const { return (p - Eigen::MatrixXd::Identity(p.rows(), p.cols())).cwiseAbs().maxCoeff() == 0.0; }
};

/// Nearest-centroid assignment of one IQ point. Distances scale uniformly
/// under z -> a·z of the whole plane, so assignments are invariant when
/// points and centroids are transformed together.
inline int classify_point(const std::vector<Complex>& centroids, Complex z) {
    int best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        const double d = std::norm(z - centroids[k]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

namespace detail {

// One readout of a single qudit prepared in `level`: centroid plus circular
// Gaussian noise, classified to the nearest centroid.
inline int sample_level(const std::vector<Complex>& centroids, double sigma, int level, Rng& rng) {
    return classify_point(centroids, centroids[level] + sigma * rng.normal_complex());
}

}  // namespace detail

struct ClassifiedCounts {
    std::vector<int> dims;
    std::vector<std::int64_t> counts;  // per joint ditstring
    ConfusionMatrix confusion;
};

/// Per-state confusion estimate: prepare each joint basis state, push each
/// dit through its independent readout channel, normalize rows.
inline ConfusionMatrix estimate_confusion(const std::vector<ReadoutModel>& models,
                                          const std::vector<int>& dims,
                                          std::int64_t shots_per_state, std::uint64_t seed) {
    if (models.size() != dims.size()) throw ShapeMismatchError("estimate_confusion: model per qudit");
    if (shots_per_state < 100) throw Error("estimate_confusion: shots_per_state >= 100 required");
    const std::int64_t n = total_dim(dims);
    std::vector<std::vector<Complex>> centroids(models.size());
    std::vector<double> sigma(models.size());
    for (std::size_t q = 0; q < models.size(); ++q) {
        models[q].validate();
        if (models[q].dim() < dims[q]) throw InvalidDimensionError("estimate_confusion: model dim");
        centroids[q] = iq_centroids(models[q]);
        centroids[q].resize(dims[q]);
        sigma[q] = min_centroid_separation(centroids[q]) / models[q].snr;
    }
    ConfusionMatrix cm;
    cm.dims = dims;
    cm.p = Eigen::MatrixXd::Zero(n, n);
    Rng base(seed);
    for (std::int64_t prep = 0; prep < n; ++prep) {
        Rng rng = base.derive(static_cast<std::uint64_t>(prep));
        const auto digits = index_to_digits(prep, dims);
        for (std::int64_t s = 0; s < shots_per_state; ++s) {
            std::vector<int> measured(dims.size());
            for (std::size_t q = 0; q < dims.size(); ++q) {
                measured[q] = detail::sample_level(centroids[q], sigma[q], digits[q], rng);
            }
            cm.p(prep, ditstring_index(measured, dims)) += 1.0;
        }
    }
    cm.p /= static_cast<double>(shots_per_state);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm.p);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    cm.singular = smin < 1e-12 * smax;
    cm.condition_number = cm.singular ? std::numeric_limits<double>::infinity() : smax / smin;
    return cm;
}

/// Sample `shots` joint readouts of a state (Born draw, then per-dit IQ
/// classification) and attach a confusion estimate taken with the same
/// models. Deterministic under the models' seed.
inline ClassifiedCounts sample_and_classify(const std::vector<ReadoutModel>& models,
                                            const QuantumState& state, std::int64_t shots,
                                            std::int64_t confusion_shots_per_state = 1000) {
    if (shots < 1) throw Error("sample_and_classify: shots >= 1 required");
    const auto& dims = state.dims;
    if (models.size() != dims.size()) throw ShapeMismatchError("sample_and_classify: model per qudit");
    const std::int64_t n = total_dim(dims);
    std::vector<double> probs(n);
    for (std::int64_t i = 0; i < n; ++i) probs[i] = state.population(i);

    std::vector<std::vector<Complex>> centroids(models.size());
    std::vector<double> sigma(models.size());
    std::uint64_t seed = 0;
    for (std::size_t q = 0; q < models.size(); ++q) {
        models[q].validate();
        centroids[q] = iq_centroids(models[q]);
        centroids[q].resize(dims[q]);
        sigma[q] = min_centroid_separation(centroids[q]) / models[q].snr;
        seed ^= models[q].seed + 0x9e3779b97f4a7c15ULL * (q + 1);
    }

    ClassifiedCounts out;
    out.dims = dims;
    out.counts.assign(n, 0);
    Rng rng(seed);
    for (std::int64_t s = 0; s < shots; ++s) {
        const std::int64_t drawn = static_cast<std::int64_t>(rng.categorical(probs));
        const auto digits = index_to_digits(drawn, dims);
        std::vector<int> measured(dims.size());
        for (std::size_t q = 0; q < dims.size(); ++q) {
            measured[q] = detail::sample_level(centroids[q], sigma[q], digits[q], rng);
        }
        ++out.counts[ditstring_index(measured, dims)];
    }
    out.confusion = estimate_confusion(models, dims, confusion_shots_per_state, seed + 1);
    return out;
}

/// Gaussian overlap oracle for collinear, equally separated centroids: the
/// probability that a circular Gaussian centered on centroid k is classified
/// as centroid j under nearest-centroid slabs. Q(x) upper tail of N(0, 1).
inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double collinear_assignment_probability(int d, int prepared, int measured, double snr) {
    // Unit separation, sigma = 1/snr; slab boundaries at midpoints.
    const double sigma = 1.0 / snr;
    const double x = static_cast<double>(measured - prepared);
    const double lo = (measured == 0) ? -1e30 : x - 0.5;
    const double hi = (measured == d - 1) ? 1e30 : x + 0.5;
    return gaussian_tail(lo / sigma) - gaussian_tail(hi / sigma);
}

inline void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& os) {
    const std::int64_t n = cm.p.rows();
    os << "prepared\\measured";
    for (std::int64_t c = 0; c < n; ++c) os << "," << ditstring_label(c, cm.dims);
    os << "\n";
    char buf[32];
    for (std::int64_t r = 0; r < n; ++r) {
        os << ditstring_label(r, cm.dims);
        for (std::int64_t c = 0; c < n; ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", cm.p(r, c));
            os << "," << buf;
        }
        os << "\n";
    }
}

}  // namespace qladder
