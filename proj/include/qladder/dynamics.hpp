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
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qladder/analytics.hpp"
#include "qladder/errors.hpp"
#include "qladder/model.hpp"
#include "qladder/parallel.hpp"

namespace qladder {

/// A chain of driven coupled qudits. All drives in one schedule share the
/// rotating-frame frequency (monochromatic scheme).
struct Chain {
    std::vector<QuditParams> qudits;
    std::vector<CouplingSpec> couplings;

    std::vector<int> dims() const {
        std::vector<int> d;
        d.reserve(qudits.size());
        for (const auto& q : qudits) d.push_back(q.dim);
        return d;
    }

    void validate() const {
        if (qudits.empty()) throw Error("Chain: no qudits");
        if (qudits.size() > 4) throw Error("Chain: at most 4 qudits supported");
        for (const auto& q : qudits) q.validate();
        for (const auto& c : couplings) {
            c.validate();
            if (c.qudit_a >= static_cast<int>(qudits.size()) ||
                c.qudit_b >= static_cast<int>(qudits.size())) {
                throw Error("Chain: coupling references missing qudit");
            }
            if (c.resonator_freq) {
                // Dispersive-bus regime: the effective coupling picture needs
                // g01 well inside the qudit-resonator detunings.
                const double da = std::abs(qudits[c.qudit_a].freq01 - *c.resonator_freq);
                const double db = std::abs(qudits[c.qudit_b].freq01 - *c.resonator_freq);
                if (c.g01 > 0.1 * std::min(da, db)) {
                    throw OutOfRegimeError("Chain: g01 not small against the resonator detuning");
                }
            }
        }
    }
};

struct DriveSchedule {
    std::vector<DriveTone> tones;
    double total_time = 0.0;
    double dt = 0.0;

    void validate() const {
        if (!(dt > 0.0)) throw StepSizeError("DriveSchedule: dt must be > 0");
        double max_amp = 0.0, min_ramp = 0.0;
        for (const auto& t : tones) {
            t.validate();
            max_amp = std::max(max_amp, t.amp);
            if (t.ramp_time > 0.0) {
                min_ramp = (min_ramp == 0.0) ? t.ramp_time : std::min(min_ramp, t.ramp_time);
            }
        }
        if (max_amp > 0.0 && dt > 1.0 / (50.0 * max_amp)) {
            throw StepSizeError("DriveSchedule: dt exceeds 1/(50 max amp)");
        }
        if (min_ramp > 0.0 && dt > min_ramp / 100.0) {
            throw StepSizeError("DriveSchedule: dt exceeds ramp_time/100");
        }
        if (!tones.empty()) {
            const double f = tones.front().freq;
            for (const auto& t : tones) {
                if (t.freq != f) {
                    throw MultichromaticError("DriveSchedule: mixed drive frequencies unsupported");
                }
            }
        }
    }
};

struct Trajectory {
    std::vector<double> times;
    // One row per recorded time, one column per joint basis state.
    std::vector<std::vector<double>> populations;
    QuantumState final_state;
};

namespace detail {

// Static part of H in the drive rotating frame:
//   Σ_i [(Δ_i − α_i/2) n_i + (α_i/2) n_i²] + Σ g (a†_a a_b + a_a a†_b),
// with Δ_i = ω_d − ω01_i.
inline MatrixXcd static_hamiltonian(const Chain& chain, double drive_freq) {
    const auto dims = chain.dims();
    const std::int64_t n = total_dim(dims);
    MatrixXcd h = MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < chain.qudits.size(); ++i) {
        const auto& q = chain.qudits[i];
        const double delta = drive_freq - q.freq01;
        const double alpha = q.anharmonicity;
        MatrixXcd hq = MatrixXcd::Zero(q.dim, q.dim);
        for (int k = 0; k < q.dim; ++k) {
            const double kk = static_cast<double>(k);
            hq(k, k) = (delta - 0.5 * alpha) * kk + 0.5 * alpha * kk * kk;
        }
        h += embed_operator(hq, static_cast<int>(i), dims);
    }
    for (const auto& c : chain.couplings) {
        const MatrixXcd aa = embed_operator(annihilation_operator(dims[c.qudit_a]), c.qudit_a, dims);
        const MatrixXcd ab = embed_operator(annihilation_operator(dims[c.qudit_b]), c.qudit_b, dims);
        h += c.g01 * (aa.adjoint() * ab + aa * ab.adjoint());
    }
    return h;
}

// Drive operator of one tone at unit envelope: (amp/2)(a e^{-iφ} + a† e^{iφ}).
inline MatrixXcd drive_operator(const Chain& chain, const DriveTone& tone) {
    const auto dims = chain.dims();
    const MatrixXcd a = annihilation_operator(dims[tone.target]);
    const Complex phase = std::exp(Complex(0.0, tone.phase));
    MatrixXcd d = 0.5 * tone.amp * (a * std::conj(phase) + a.adjoint() * phase);
    return embed_operator(d, tone.target, dims);
}

}  // namespace detail

/// Full rotating-frame Hamiltonian with each tone scaled by the supplied
/// instantaneous envelope value. All tones must share one frequency.
inline MatrixXcd rotating_hamiltonian(const Chain& chain, const std::vector<DriveTone>& tones,
                                      const std::vector<double>& envelope_values) {
    chain.validate();
    if (tones.size() != envelope_values.size()) {
        throw ShapeMismatchError("rotating_hamiltonian: one envelope value per tone");
    }
    if (!tones.empty()) {
        const double f = tones.front().freq;
        for (const auto& t : tones) {
            if (t.freq != f) {
                throw MultichromaticError("rotating_hamiltonian: mixed drive frequencies");
            }
        }
    }
    const double wd = tones.empty() ? 0.0 : tones.front().freq;
    MatrixXcd h = detail::static_hamiltonian(chain, wd);
    for (std::size_t i = 0; i < tones.size(); ++i) {
        if (envelope_values[i] == 0.0) continue;
        h += envelope_values[i] * detail::drive_operator(chain, tones[i]);
    }
    return h;
}

/// Default integration step: respects the schedule bounds and additionally
/// caps the (midpoint-shifted) spectral scale of H so the fixed-step
/// 4th-order integrator preserves the norm over the full schedule.
inline double default_dt(const Chain& chain, const std::vector<DriveTone>& tones) {
    std::vector<double> full(tones.size(), 1.0);
    const MatrixXcd h = rotating_hamiltonian(chain, tones, full);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double half_spread = std::max(0.5 * (hi - lo), 1.0);
    double dt = 0.015 / half_spread;
    double max_amp = 0.0, min_ramp = 0.0;
    for (const auto& t : tones) {
        max_amp = std::max(max_amp, t.amp);
        if (t.ramp_time > 0.0) {
            min_ramp = (min_ramp == 0.0) ? t.ramp_time : std::min(min_ramp, t.ramp_time);
        }
    }
    if (max_amp > 0.0) dt = std::min(dt, 1.0 / (50.0 * max_amp));
    if (min_ramp > 0.0) dt = std::min(dt, min_ramp / 100.0);
    return dt;
}

inline DriveSchedule make_schedule(std::vector<DriveTone> tones, const Chain& chain,
                                   double total_time = -1.0, double dt = 0.0) {
    DriveSchedule s;
    s.tones = std::move(tones);
    if (total_time < 0.0) {
        for (const auto& t : s.tones) total_time = std::max(total_time, t.total_time());
        if (total_time < 0.0) total_time = 0.0;
    }
    s.total_time = total_time;
    s.dt = (dt > 0.0) ? dt : default_dt(chain, s.tones);
    return s;
}

/// Fixed-step 4th-order unitary integration with the envelope held constant
/// across each step (sampled at the step midpoint).
inline Trajectory evolve(const QuantumState& initial, const DriveSchedule& schedule,
                         const Chain& chain, int record_points = 2001) {
    chain.validate();
    schedule.validate();
    if (initial.is_density) throw Error("evolve: pure states only");
    initial.validate();
    const auto dims = chain.dims();
    if (initial.dims != dims) throw ShapeMismatchError("evolve: state dims do not match chain");
    for (int d : dims) {
        if (d > 6) throw InvalidDimensionError("evolve: dims <= 6 per qudit");
    }
    if (dims.size() > 4) throw InvalidDimensionError("evolve: at most 4 qudits");

    const std::int64_t n_steps =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(schedule.total_time / schedule.dt)));
    const double dt = schedule.total_time / static_cast<double>(n_steps);
    const std::int64_t stride = std::max<std::int64_t>(1, n_steps / std::max(1, record_points - 1));

    const double wd = schedule.tones.empty() ? 0.0 : schedule.tones.front().freq;
    MatrixXcd h0 = detail::static_hamiltonian(chain, wd);
    std::vector<MatrixXcd> drive_ops;
    drive_ops.reserve(schedule.tones.size());
    for (const auto& t : schedule.tones) drive_ops.push_back(detail::drive_operator(chain, t));

    // Shift by the spectral midpoint; a global phase that keeps ‖H·dt‖ small.
    {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h0, Eigen::EigenvaluesOnly);
        const double mid = 0.5 * (es.eigenvalues().minCoeff() + es.eigenvalues().maxCoeff());
        h0 -= mid * MatrixXcd::Identity(h0.rows(), h0.cols());
    }

    const std::int64_t dim = h0.rows();
    VectorXcd psi = initial.vec;
    Trajectory traj;
    auto record = [&](double t) {
        traj.times.push_back(t);
        std::vector<double> row(dim);
        for (std::int64_t i = 0; i < dim; ++i) row[i] = std::norm(psi(i));
        traj.populations.push_back(std::move(row));
    };
    record(0.0);

    MatrixXcd h(dim, dim);
    VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const Complex mi(0.0, -1.0);
    for (std::int64_t step = 0; step < n_steps; ++step) {
        const double t_mid = (static_cast<double>(step) + 0.5) * dt;
        h = h0;
        for (std::size_t i = 0; i < drive_ops.size(); ++i) {
            const double env = schedule.tones[i].envelope(t_mid);
            if (env != 0.0) h.noalias() += env * drive_ops[i];
        }
        k1.noalias() = mi * (h * psi);
        tmp = psi + (0.5 * dt) * k1;
        k2.noalias() = mi * (h * tmp);
        tmp = psi + (0.5 * dt) * k2;
        k3.noalias() = mi * (h * tmp);
        tmp = psi + dt * k3;
        k4.noalias() = mi * (h * tmp);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if ((step & 1023) == 1023) {
            const double drift = std::abs(psi.norm() - 1.0);
            if (drift > 1e-6) {
                throw StepSizeError("evolve: norm drift " + std::to_string(drift) +
                                    " exceeds 1e-6; reduce dt");
            }
        }
        if ((step + 1) % stride == 0 || step + 1 == n_steps) {
            record(static_cast<double>(step + 1) * dt);
        }
    }
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > 1e-6) {
        throw StepSizeError("evolve: norm drift " + std::to_string(drift) +
                            " exceeds 1e-6; reduce dt");
    }
    traj.final_state = QuantumState::pure(dims, std::move(psi));
    return traj;
}

/// Accumulated propagator of a schedule (same stepping as evolve); used by
/// unitarity checks and truth-table style verification.
inline MatrixXcd evolve_propagator(const DriveSchedule& schedule, const Chain& chain) {
    chain.validate();
    schedule.validate();
    const double wd = schedule.tones.empty() ? 0.0 : schedule.tones.front().freq;
    MatrixXcd h0 = detail::static_hamiltonian(chain, wd);
    {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h0, Eigen::EigenvaluesOnly);
        const double mid = 0.5 * (es.eigenvalues().minCoeff() + es.eigenvalues().maxCoeff());
        h0 -= mid * MatrixXcd::Identity(h0.rows(), h0.cols());
    }
    std::vector<MatrixXcd> drive_ops;
    for (const auto& t : schedule.tones) drive_ops.push_back(detail::drive_operator(chain, t));
    const std::int64_t n_steps =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(schedule.total_time / schedule.dt)));
    const double dt = schedule.total_time / static_cast<double>(n_steps);
    const std::int64_t dim = h0.rows();
    MatrixXcd u = MatrixXcd::Identity(dim, dim);
    MatrixXcd h(dim, dim), k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);
    const Complex mi(0.0, -1.0);
    for (std::int64_t step = 0; step < n_steps; ++step) {
        const double t_mid = (static_cast<double>(step) + 0.5) * dt;
        h = h0;
        for (std::size_t i = 0; i < drive_ops.size(); ++i) {
            const double env = schedule.tones[i].envelope(t_mid);
            if (env != 0.0) h.noalias() += env * drive_ops[i];
        }
        k1.noalias() = mi * (h * u);
        tmp = u + (0.5 * dt) * k1;
        k2.noalias() = mi * (h * tmp);
        tmp = u + (0.5 * dt) * k2;
        k3.noalias() = mi * (h * tmp);
        tmp = u + dt * k3;
        k4.noalias() = mi * (h * tmp);
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

struct ChevronPoint {
    double freq = 0.0;
    double duration = 0.0;
    double population = 0.0;
    bool failed = false;
};

struct ChevronMap {
    std::vector<double> freqs;
    std::vector<double> durations;
    // Row-major [duration][freq].
    std::vector<ChevronPoint> points;
    const ChevronPoint& at(std::size_t i_dur, std::size_t i_freq) const {
        return points[i_dur * freqs.size() + i_freq];
    }
};

/// Builds symmetric two-tone drives for the (k,l) -> (k+1,l+1) transition of
/// a coupled pair. `omega` is the resonant Rabi rate in the addressed
/// subspaces of qudit b; qudit a is driven at λ·omega. Base amplitudes are
/// scaled down by the ladder matrix elements so the subspace rates hit the
/// requested values.
inline std::vector<DriveTone> two_photon_tones(const Chain& chain, int k, int l, double freq,
                                               double omega, double lambda, double phi1,
                                               double phi2, double ramp_time, double hold_time) {
    if (chain.qudits.size() < 2) throw Error("two_photon_tones: need a coupled pair");
    DriveTone t1, t2;
    t1.target = 0;
    t1.freq = freq;
    t1.amp = lambda * omega / std::sqrt(static_cast<double>(k + 1));
    t1.phase = phi1;
    t1.ramp_time = ramp_time;
    t1.hold_time = hold_time;
    t2.target = 1;
    t2.freq = freq;
    t2.amp = omega / std::sqrt(static_cast<double>(l + 1));
    t2.phase = phi2;
    t2.ramp_time = ramp_time;
    t2.hold_time = hold_time;
    return {t1, t2};
}

struct ChevronConfig {
    int k = 0;
    int l = 0;
    double omega = 0.0;       // subspace Rabi rate on qudit b
    double lambda = 1.0;      // Ω1/Ω2
    double ramp_time = 100e-9;
    int threads = 0;
    double dt = 0.0;          // 0 = auto
};

/// Population map P(|k+1,l+1>) over a (drive frequency x hold duration) grid.
/// Each grid point is an independent pulse; failures are marked and the scan
/// continues.
inline ChevronMap chevron_scan(const Chain& chain, const ChevronConfig& cfg,
                               const std::vector<double>& freq_grid,
                               const std::vector<double>& duration_grid) {
    if (freq_grid.empty() || duration_grid.empty()) {
        throw Error("chevron_scan: empty grid");
    }
    const auto dims = chain.dims();
    std::vector<int> start_digits(dims.size(), 0), target_digits(dims.size(), 0);
    start_digits[0] = cfg.k;
    start_digits[1] = cfg.l;
    target_digits[0] = cfg.k + 1;
    target_digits[1] = cfg.l + 1;
    const std::int64_t target_index = ditstring_index(target_digits, dims);
    const QuantumState initial = QuantumState::basis(dims, start_digits);

    ChevronMap map;
    map.freqs = freq_grid;
    map.durations = duration_grid;
    map.points.resize(freq_grid.size() * duration_grid.size());
    parallel_for(map.points.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t i_dur = idx / freq_grid.size();
        const std::size_t i_freq = idx % freq_grid.size();
        ChevronPoint pt;
        pt.freq = freq_grid[i_freq];
        pt.duration = duration_grid[i_dur];
        try {
            auto tones = two_photon_tones(chain, cfg.k, cfg.l, pt.freq, cfg.omega, cfg.lambda, 0.0,
                                          0.0, cfg.ramp_time, pt.duration);
            auto schedule = make_schedule(tones, chain, -1.0, cfg.dt);
            auto traj = evolve(initial, schedule, chain, 2);
            pt.population = traj.final_state.population(target_index);
        } catch (const Error&) {
            pt.failed = true;
        }
        map.points[idx] = pt;
    });
    return map;
}

namespace detail {

// Tracked transition frequency E_{k+1} - E_k of one driven qudit after an
// adiabatic amplitude ramp 0 -> omega, by exact diagonalization with
// maximal-overlap eigenstate tracking (>= 50 steps). Ties pick the
// lower-index eigenvector.
inline double tracked_dressed_frequency(const QuditParams& q, double drive_freq, double omega,
                                        int k, int ramp_steps = 60) {
    const double delta = drive_freq - q.freq01;
    const double alpha = q.anharmonicity;
    MatrixXcd hq = MatrixXcd::Zero(q.dim, q.dim);
    for (int m = 0; m < q.dim; ++m) {
        const double mm = static_cast<double>(m);
        hq(m, m) = (delta - 0.5 * alpha) * mm + 0.5 * alpha * mm * mm;
    }
    const MatrixXcd a = annihilation_operator(q.dim);
    const MatrixXcd drive = 0.5 * (a + a.adjoint());

    VectorXcd v_lo = VectorXcd::Zero(q.dim), v_hi = VectorXcd::Zero(q.dim);
    v_lo(k) = 1.0;
    v_hi(k + 1) = 1.0;
    double e_lo = hq(k, k).real(), e_hi = hq(k + 1, k + 1).real();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
    for (int s = 1; s <= ramp_steps; ++s) {
        const double omega_s = omega * static_cast<double>(s) / static_cast<double>(ramp_steps);
        es.compute(hq + omega_s * drive);
        auto track = [&](const VectorXcd& prev, double& energy, VectorXcd& vec) {
            int best = 0;
            double best_overlap = -1.0;
            for (int i = 0; i < q.dim; ++i) {
                const double ov = std::abs(prev.dot(es.eigenvectors().col(i)));
                if (ov > best_overlap + 1e-12) {
                    best_overlap = ov;
                    best = i;
                }
            }
            if (best_overlap < 0.5) {
                throw DiabaticTrackingError(
                    "find_resonance_ed: eigenstate tracking lost (overlap < 0.5)");
            }
            energy = es.eigenvalues()(best);
            vec = es.eigenvectors().col(best);
        };
        track(v_lo, e_lo, v_lo);
        track(v_hi, e_hi, v_hi);
    }
    return e_hi - e_lo;
}

}  // namespace detail

struct ResonanceOptions {
    int k = 0;
    int l = 0;
    int ramp_steps = 60;
    double bracket_pad = 1e-6;  // relative to |Δq12|
    double tol_factor = 1e-10;  // ω_d bisection width, relative to |Δq12|
};

/// Optimal drive frequency for the (k,l) -> (k+1,l+1) two-photon transition
/// by exact diagonalization: bisects ω_d until the tracked dressed
/// frequencies satisfy ω̃_a + ω̃_b = 0 within 1e-6 |Δq12|.
inline double find_resonance_ed(const Chain& chain, double omega, double lambda,
                                const ResonanceOptions& opt = {}) {
    chain.validate();
    if (chain.qudits.size() < 2) throw Error("find_resonance_ed: need a pair");
    const QuditParams& qa = chain.qudits[0];
    const QuditParams& qb = chain.qudits[1];
    const double wa = qa.transition_freq(opt.k);
    const double wb = qb.transition_freq(opt.l);
    if (wa >= wb) throw Error("find_resonance_ed: requires ω_a < ω_b for the chosen subspace");
    const double span = std::abs(wa - wb);
    const double base_a = lambda * omega / std::sqrt(static_cast<double>(opt.k + 1));
    const double base_b = omega / std::sqrt(static_cast<double>(opt.l + 1));

    auto sum = [&](double wd) {
        const double da = detail::tracked_dressed_frequency(qa, wd, base_a, opt.k, opt.ramp_steps);
        const double db = detail::tracked_dressed_frequency(qb, wd, base_b, opt.l, opt.ramp_steps);
        return da + db;
    };

    double lo = wa + opt.bracket_pad * span;
    double hi = wb - opt.bracket_pad * span;
    double f_lo = sum(lo), f_hi = sum(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (f_lo * f_hi > 0.0) {
        throw NoResonanceError("find_resonance_ed: no sign change in bracket");
    }
    const double width_tol = opt.tol_factor * span;
    double mid = 0.5 * (lo + hi);
    while (hi - lo > width_tol) {
        mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f_mid = sum(mid);
        if (f_mid == 0.0) return mid;
        if (f_lo * f_mid < 0.0) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    mid = 0.5 * (lo + hi);
    if (std::abs(sum(mid)) > 1e-6 * span) {
        throw NoResonanceError("find_resonance_ed: residual dressed-frequency sum too large");
    }
    return mid;
}

struct RateFit {
    double rate = 0.0;       // Ω_2p (rad/s)
    double amplitude = 0.0;  // A
    double offset = 0.0;     // B
    double phase = 0.0;      // φ0
    double residual = 0.0;   // RMS of fit residuals
};

/// Least-squares fit of P(t) = A sin²(Ω t/2 + φ0) + B on the constant-envelope
/// segment of a trajectory. For fixed Ω the model is linear in
/// (c0, c1, c2) with P = c0 + c1 cos(Ωt) + c2 sin(Ωt); Ω is found by a grid
/// scan over the spectrum followed by golden-section refinement.
inline RateFit extract_rate(const Trajectory& traj, std::int64_t target_index,
                            double window_start = 0.0, double window_end = -1.0) {
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < window_start) continue;
        if (window_end > 0.0 && t > window_end) continue;
        ts.push_back(t);
        ys.push_back(traj.populations[i][target_index]);
    }
    if (ts.size() < 8) throw Error("extract_rate: too few samples in window");

    auto linear_fit = [&](double w, double* c0_out = nullptr, double* c1_out = nullptr,
                          double* c2_out = nullptr) {
        // Normal equations for [1, cos(wt), sin(wt)].
        double s[3][3] = {{0}}, b[3] = {0};
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double ct = std::cos(w * ts[i]);
            const double st = std::sin(w * ts[i]);
            const double row[3] = {1.0, ct, st};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) s[r][c] += row[r] * row[c];
                b[r] += row[r] * ys[i];
            }
        }
        Eigen::Matrix3d m;
        Eigen::Vector3d rhs;
        for (int r = 0; r < 3; ++r) {
            rhs(r) = b[r];
            for (int c = 0; c < 3; ++c) m(r, c) = s[r][c];
        }
        const Eigen::Vector3d sol = m.ldlt().solve(rhs);
        double sse = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double fit = sol(0) + sol(1) * std::cos(w * ts[i]) + sol(2) * std::sin(w * ts[i]);
            sse += (ys[i] - fit) * (ys[i] - fit);
        }
        if (c0_out) *c0_out = sol(0);
        if (c1_out) *c1_out = sol(1);
        if (c2_out) *c2_out = sol(2);
        return std::sqrt(sse / static_cast<double>(ts.size()));
    };

    const double t_span = ts.back() - ts.front();
    const double w_min = 2.0 * M_PI * 0.5 / t_span;  // at least half a period in window
    // Mean sample spacing limits the resolvable frequency.
    const double mean_dt = t_span / static_cast<double>(ts.size() - 1);
    const double w_max = M_PI / mean_dt * 0.5;
    double best_w = w_min, best_res = 1e300;
    const int n_scan = 2400;
    for (int i = 0; i <= n_scan; ++i) {
        const double w = w_min * std::pow(w_max / w_min, static_cast<double>(i) / n_scan);
        const double r = linear_fit(w);
        if (r < best_res) {
            best_res = r;
            best_w = w;
        }
    }
    // Golden-section refinement around the best scan point.
    double a = best_w / std::pow(w_max / w_min, 1.5 / n_scan);
    double b2 = best_w * std::pow(w_max / w_min, 1.5 / n_scan);
    const double gr = 0.6180339887498949;
    double x1 = b2 - gr * (b2 - a), x2 = a + gr * (b2 - a);
    double f1 = linear_fit(x1), f2 = linear_fit(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            b2 = x2;
            x2 = x1;
            f2 = f1;
            x1 = b2 - gr * (b2 - a);
            f1 = linear_fit(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b2 - a);
            f2 = linear_fit(x2);
        }
    }
    const double w = 0.5 * (a + b2);
    double c0, c1, c2;
    const double res = linear_fit(w, &c0, &c1, &c2);
    if (res > 0.05) {
        throw PoorFitError("extract_rate: fit residual " + std::to_string(res) + " exceeds 0.05",
                           res);
    }
    RateFit fit;
    fit.rate = w;
    fit.amplitude = 2.0 * std::hypot(c1, c2);
    fit.offset = c0 - 0.5 * fit.amplitude;
    // P = c0 + c1 cos + c2 sin with c1 = -A/2 cos(2φ0), c2 = A/2 sin(2φ0).
    fit.phase = 0.5 * std::atan2(c2, -c1);
    fit.residual = res;
    return fit;
}

}  // namespace qladder
