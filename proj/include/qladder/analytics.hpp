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

#include <cmath>
#include <utility>

#include "qladder/errors.hpp"
#include "qladder/model.hpp"

namespace qladder {

/// Duffing parameters of a transmon from its design energies (both in Hz):
/// freq01 = sqrt(8 E_J E_C) - E_C, anharmonicity = E_C. Valid for
/// E_J/E_C > 50.
inline std::pair<double, double> duffing_from_transmon(double ec, double ej) {
    if (!(ec > 0.0) || !(ej > 0.0)) throw Error("duffing_from_transmon: energies must be > 0");
    if (!(ej / ec > 50.0)) {
        throw OutOfRegimeError("duffing_from_transmon: E_J/E_C must exceed 50");
    }
    const double freq01 = std::sqrt(8.0 * ej * ec) - ec;
    return {freq01, ec};
}

/// Resonator-mediated qudit-qudit coupling g = (g_ar g_br / 2)(1/Δ_ar + 1/Δ_br).
inline double effective_coupling(double g_ar, double g_br, double delta_ar, double delta_br) {
    if (delta_ar == 0.0 || delta_br == 0.0) {
        throw SingularityError("effective_coupling: zero qudit-resonator detuning");
    }
    return 0.5 * g_ar * g_br * (1.0 / delta_ar + 1.0 / delta_br);
}

/// Effective coupling from a CouplingSpec and the two bare qudit frequencies.
/// With use_dressed the detunings are taken against the resonator-dressed
/// transition frequencies ω̃_q = ω_q + g²/(ω_q − ω_r); bare otherwise.
inline double effective_coupling_from_spec(const CouplingSpec& spec, double freq_a, double freq_b,
                                           bool use_dressed = false) {
    if (!spec.resonator_freq || !spec.g_ar || !spec.g_br) {
        throw Error("effective_coupling_from_spec: resonator fields missing");
    }
    const double wr = *spec.resonator_freq;
    double wa = freq_a, wb = freq_b;
    if (use_dressed) {
        wa += (*spec.g_ar) * (*spec.g_ar) / (freq_a - wr);
        wb += (*spec.g_br) * (*spec.g_br) / (freq_b - wr);
    }
    return effective_coupling(*spec.g_ar, *spec.g_br, wa - wr, wb - wr);
}

/// Mixing angle of a driven level pair: cos θ = Δ/√(Δ²+Ω²), sin θ = Ω/√(Δ²+Ω²).
inline double mixing_angle(double delta, double omega) {
    if (delta == 0.0 && omega == 0.0) {
        throw UndefinedAngleError("mixing_angle: Δ = Ω = 0 leaves θ undefined");
    }
    return std::atan2(omega, delta);
}

inline DressedAngles make_dressed_angles(double delta1, double omega1, double delta2,
                                         double omega2) {
    DressedAngles a;
    a.delta_1 = delta1;
    a.delta_2 = delta2;
    a.omega_1 = omega1;
    a.omega_2 = omega2;
    a.theta_1 = mixing_angle(delta1, omega1);
    a.theta_2 = mixing_angle(delta2, omega2);
    return a;
}

/// Dressed transition frequency ω̃ = sgn(Δ)·√(Δ²+Ω²), with sgn(0) := +1.
inline double dressed_frequency(double delta, double omega) {
    if (delta == 0.0 && omega == 0.0) {
        throw UndefinedAngleError("dressed_frequency: Δ = Ω = 0");
    }
    const double sign = (delta < 0.0) ? -1.0 : 1.0;
    return sign * std::sqrt(delta * delta + omega * omega);
}

/// Two-photon oscillation rate
///   Ω_2p = (g_kl/2)[(1+cosθ1)(1+cosθ2) + (1−cosθ1)(1−cosθ2)]
///        = g_kl (1 + cosθ1 cosθ2).
inline double two_photon_rate(double g_kl, const DressedAngles& angles) {
    const double c1 = std::cos(angles.theta_1);
    const double c2 = std::cos(angles.theta_2);
    return 0.5 * g_kl * ((1.0 + c1) * (1.0 + c2) + (1.0 - c1) * (1.0 - c2));
}

/// Dressed-frame interaction rates for drive phases (φ1, φ2):
///   J_I  =  (g/8)[(1+c1)(1+c2)cos2φ1 + (1−c1)(1−c2)cos2φ2]
///   J_Q  = −(g/8)[(1+c1)(1+c2)sin2φ1 + (1−c1)(1−c2)sin2φ2]
///   J_ZZ = −(g/2) sinθ1 sinθ2 cos(φ1−φ2)
inline InteractionRates interaction_rates(double g, const DressedAngles& angles, double phi1,
                                          double phi2) {
    const double c1 = std::cos(angles.theta_1);
    const double c2 = std::cos(angles.theta_2);
    const double s1 = std::sin(angles.theta_1);
    const double s2 = std::sin(angles.theta_2);
    const double up = (1.0 + c1) * (1.0 + c2);
    const double dn = (1.0 - c1) * (1.0 - c2);
    InteractionRates r;
    r.j_i = g / 8.0 * (up * std::cos(2.0 * phi1) + dn * std::cos(2.0 * phi2));
    r.j_q = -g / 8.0 * (up * std::sin(2.0 * phi1) + dn * std::sin(2.0 * phi2));
    r.j_zz = -0.5 * g * s1 * s2 * std::cos(phi1 - phi2);
    r.omega_2p = 4.0 * std::hypot(r.j_i, r.j_q);
    return r;
}

/// Two-level optimal drive frequency
///   ω_d = (ω_q1 + ω_q2)/2 + (λ² − 1)Ω² / (2(ω_q1 − ω_q2)),
/// where Ω is the amplitude on qudit 2 and λ = Ω1/Ω2.
inline double optimal_drive_frequency_2ls(double wq1, double wq2, double omega, double lambda) {
    if (wq1 == wq2) {
        throw DegeneratePairError("optimal_drive_frequency_2ls: equal qudit frequencies");
    }
    const double midpoint = 0.5 * (wq1 + wq2);
    return midpoint + (lambda * lambda - 1.0) * omega * omega / (2.0 * (wq1 - wq2));
}

/// Rabi rate in the (k, k+1) subspace: Ω_{k,k+1} = sqrt(k+1) Ω.
inline double subspace_rabi_rate(double base_omega, int k) {
    if (k < 0) throw Error("subspace_rabi_rate: k must be >= 0");
    return std::sqrt(static_cast<double>(k + 1)) * base_omega;
}

/// Bare coupling between |k,l+1> and |k+1,l>: g_kl = g01 sqrt((k+1)(l+1)).
inline double coupling_matrix_element(double g01, int k, int l) {
    if (k < 0 || l < 0) throw Error("coupling_matrix_element: levels must be >= 0");
    return g01 * std::sqrt(static_cast<double>((k + 1) * (l + 1)));
}

}  // namespace qladder
