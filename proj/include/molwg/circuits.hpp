#pragma once

#include <complex>
#include <map>
#include <vector>

#include "molwg/nonlinear.hpp"
#include "molwg/units.hpp"

// Few-photon Fock-state simulator for the two devices: the dual-molecule
// HOM pair source with Stark tuning, and the nonlinear Mach-Zehnder phase
// gate. At most 2 photons; loss is modeled by coupling into fresh loss modes
// so states stay pure and total probability is conserved.
//
// Beamsplitter convention: symmetric, reflection picks up i:
//   a1 -> sqrt(T) a1 + i sqrt(1-T) a2,  a2 -> i sqrt(1-T) a1 + sqrt(T) a2.
// With this convention a balanced MZ with no phase elements routes the input
// entirely to the opposite port, which is labeled detector 0.

namespace molwg {

using Occupation = std::vector<int>;
using Amplitude = std::complex<double>;

struct FewPhotonState {
    int n_modes = 0;
    std::map<Occupation, Amplitude> amps;

    static FewPhotonState vacuum(int n_modes);
    static FewPhotonState single_photon(int n_modes, int mode);
    // product of single photons in distinct modes (total <= 2 enforced)
    static FewPhotonState photon_pair(int n_modes, int mode_a, int mode_b);

    int add_mode();               // appends a fresh (empty) mode, returns its index
    double total_probability() const;
    double mode_occupation_probability(int mode, int count) const;
    void prune(double tol = 1e-16);
};

// Standard two-mode linear transformation; throws std::invalid_argument for
// overlapping or out-of-range mode indices or T outside [0,1].
FewPhotonState apply_beamsplitter(const FewPhotonState& s, int mode1, int mode2,
                                  double transmissivity);

FewPhotonState apply_phase(const FewPhotonState& s, int mode, double phase);

// Loss channel: transmission fraction into the surviving mode, remainder into
// a fresh loss mode appended to the state.
FewPhotonState apply_loss(const FewPhotonState& s, int mode, double transmission);

// Saturable molecule in the path of `modes` (all co-propagating photons in
// these modes count toward m). Each basis component with m photons acquires
// phase m*phi(m); each photon is transmitted with amplitude
// sqrt(1-extinction(m)), the lost norm routed to fresh loss modes.
FewPhotonState apply_nonlinear_element(const FewPhotonState& s,
                                       const std::vector<int>& modes,
                                       const NonlinearParams& params,
                                       double delta);

struct SourceSpec {
    double center_frequency = omega_from_wavelength(785 * nm);  // rad/s
    double linewidth = 2 * pi * 30e6;                           // Gamma, rad/s
    double emission_probability = 0.5;                          // ZPL eta
    double stark_offset = 0.0;                                  // rad/s

    double emitted_frequency() const { return center_frequency + stark_offset; }
};

SourceSpec stark_tune(const SourceSpec& s, double offset);

// Squared wavepacket overlap of two exponential wavepackets:
//   V = G1 G2 / (((G1+G2)/2)^2 + Delta^2)
double wavepacket_overlap_sq(const SourceSpec& a, const SourceSpec& b);

// HOM coincidence probability for post-selected two-photon events,
// P_c = (1 - V)/2, evaluated by running the Fock engine on a two-species
// decomposition of the partially distinguishable pair.
double hom_coincidence(const SourceSpec& source1, const SourceSpec& source2);

struct MzGateResult {
    double p_detector0 = 0;
    double p_detector1 = 0;
    double p_lost = 0;           // probe photon absorbed by the molecule
    double phi_applied = 0;      // phi(m) seen by the probe component
    bool pump_present = false;
};

// Balanced MZ with the molecule in the upper arm; the pump photon, when
// present, co-propagates with the upper arm through the molecule (the m = 2
// saturation case). Probabilities are for the probe photon and sum to 1.
MzGateResult run_mz_gate(const SourceSpec& probe, bool pump_present,
                         const NonlinearParams& params, double delta);

}  // namespace molwg
