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

// Drives a coupled transmon pair at the two-photon resonance and compares
// the simulated |00> <-> |11> oscillation rate with the dressed-frame
// analytic rate, for a few drive amplitudes.

#include <cstdio>

#include "qladder/analytics.hpp"
#include "qladder/dynamics.hpp"

using namespace qladder;

int main() {
    Chain chain;
    QuditParams qa, qb;
    qa.dim = 2;
    qa.freq01 = ghz(5.30);
    qa.anharmonicity = mhz(270);
    qb.dim = 2;
    qb.freq01 = ghz(5.57);
    qb.anharmonicity = mhz(270);
    CouplingSpec g;
    g.qudit_a = 0;
    g.qudit_b = 1;
    g.g01 = mhz(3.0);
    chain.qudits = {qa, qb};
    chain.couplings = {g};

    const double w1 = qa.freq01, w2 = qb.freq01;
    std::printf("# amp_mhz  omega_d_ghz  rate_sim_mhz  rate_analytic_mhz\n");
    for (double amp_mhz : {30.0, 60.0, 90.0, 120.0}) {
        const double omega = mhz(amp_mhz);
        const double wd = optimal_drive_frequency_2ls(w1, w2, omega, 1.0);
        const double analytic =
            two_photon_rate(g.g01, make_dressed_angles(wd - w1, omega, wd - w2, omega));

        const double hold = 2.4 * kTwoPi / analytic;
        auto tones = two_photon_tones(chain, 0, 0, wd, omega, 1.0, 0.0, 0.0, 100e-9, hold);
        auto schedule = make_schedule(tones, chain);
        auto traj = evolve(QuantumState::basis(chain.dims(), {0, 0}), schedule, chain, 3001);
        const auto fit =
            extract_rate(traj, ditstring_index({1, 1}, chain.dims()), 110e-9, 100e-9 + hold);

        std::printf("%8.1f  %11.6f  %12.4f  %17.4f\n", amp_mhz, to_ghz(wd), to_mhz(fit.rate),
                    to_mhz(analytic));
    }
    return 0;
}
