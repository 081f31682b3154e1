#pragma once

#include <string>
#include <vector>

#include "molwg/units.hpp"

// Single-molecule saturable nonlinearity: light-induced Stark shift, the
// per-photon phase phi(m) for m photons passing the molecule together, the
// accompanying extinction, detuning scans and peak finding.
//
// Sign convention: phi(m) is carried with its natural sign,
//   phi(m) = -(delta/(2 m Gamma)) ln(1 + 2 m eta Gwg G / (delta^2 + (G/2)^2)),
// odd in delta and negative for positive detuning. Exports report |phi|.

namespace molwg {

struct NonlinearParams {
    double gamma = 2 * pi * 30e6;   // total decay rate, rad/s
    double eta = 0.5;               // ZPL branching ratio
    double gamma_wg_fraction = 0.5; // Gamma_wg as fraction of Gamma
    std::vector<int> photon_numbers{1, 2};

    void validate() const;  // throws std::invalid_argument
    double g0_sq() const { return eta * gamma_wg_fraction * gamma * gamma; }
};

struct PhaseResponse {
    std::vector<double> delta;                    // rad/s
    std::vector<int> photon_numbers;
    std::vector<std::vector<double>> phase;       // [k][i]: phi(m_k) at delta_i
    std::vector<double> differential;             // phi(1) - phi(2), when both present
    std::vector<std::vector<double>> extinction;  // [k][i]
};

struct PeakResult {
    double delta = 0;   // rad/s
    double value = 0;   // peak |column|
    bool degenerate = false;
};

// Instantaneous Stark shift U/hbar = g^2 delta / (delta^2 + (G/2)^2 + 2 g^2).
double stark_shift(double g_sq, double delta, double gamma);

// Closed-form phi(m), rad.
double phase_per_photon(int m, double delta, const NonlinearParams& p);

// phi(1) - phi(2).
double differential_phase(double delta, const NonlinearParams& p);

// Fractional intensity loss 1 - exp(-G|phi(m)|/|delta|); the delta = 0 value
// is the continuous limit 1 - (1 + 8 m eta Gwg/G)^(-1/(2m)).
double extinction(int m, double delta, const NonlinearParams& p);

// Amplitude transmission factor per photon, sqrt(1 - extinction).
double transmission_amplitude(int m, double delta, const NonlinearParams& p);

// Uniform scan over [delta_lo, delta_hi].
PhaseResponse scan(const NonlinearParams& p, double delta_lo, double delta_hi,
                   int samples);

// Peak of |column| over the scan grid, refined by golden-section on the
// closed form. column: "phase:m", "differential" or "extinction:m".
PeakResult find_peak(const PhaseResponse& r, const NonlinearParams& p,
                     const std::string& column);

// CSV with columns delta/Gamma, |phi(m)|..., |phi(1)-phi(2)|, extinction(m)...
std::string phase_response_csv(const PhaseResponse& r, double gamma);

}  // namespace molwg
