#include "molwg/circuits.hpp"

#include <cmath>
#include <stdexcept>

namespace molwg {

namespace {

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

void check_mode(const FewPhotonState& s, int mode) {
    if (mode < 0 || mode >= s.n_modes)
        throw std::invalid_argument("mode index out of range");
}

}  // namespace

FewPhotonState FewPhotonState::vacuum(int n_modes) {
    FewPhotonState s;
    s.n_modes = n_modes;
    s.amps[Occupation(n_modes, 0)] = 1.0;
    return s;
}

FewPhotonState FewPhotonState::single_photon(int n_modes, int mode) {
    FewPhotonState s = vacuum(n_modes);
    s.amps.clear();
    Occupation occ(n_modes, 0);
    occ[mode] = 1;
    s.amps[occ] = 1.0;
    return s;
}

FewPhotonState FewPhotonState::photon_pair(int n_modes, int mode_a, int mode_b) {
    FewPhotonState s;
    s.n_modes = n_modes;
    Occupation occ(n_modes, 0);
    occ[mode_a] += 1;
    occ[mode_b] += 1;
    s.amps[occ] = 1.0;
    return s;
}

int FewPhotonState::add_mode() {
    std::map<Occupation, Amplitude> next;
    for (auto& [occ, a] : amps) {
        Occupation ext = occ;
        ext.push_back(0);
        next[ext] = a;
    }
    amps = std::move(next);
    return n_modes++;
}

double FewPhotonState::total_probability() const {
    double p = 0;
    for (auto& [occ, a] : amps) p += std::norm(a);
    return p;
}

double FewPhotonState::mode_occupation_probability(int mode, int count) const {
    double p = 0;
    for (auto& [occ, a] : amps)
        if (occ[mode] == count) p += std::norm(a);
    return p;
}

void FewPhotonState::prune(double tol) {
    for (auto it = amps.begin(); it != amps.end();)
        it = std::abs(it->second) < tol ? amps.erase(it) : std::next(it);
}

// Expand (u11 b1 + u21 b2)^n1 (u12 b1 + u22 b2)^n2 / sqrt(n1! n2!) applied to
// vacuum and accumulate amplitudes with the sqrt(k1! k2!) Fock normalization.
static void two_mode_linear(const FewPhotonState& s, int m1, int m2,
                            Amplitude u11, Amplitude u21, Amplitude u12,
                            Amplitude u22, FewPhotonState& out) {
    for (auto& [occ, a] : s.amps) {
        const int n1 = occ[m1], n2 = occ[m2];
        // polynomial coefficients in b1 powers, total degree n1+n2
        for (int j = 0; j <= n1; ++j) {
            for (int k = 0; k <= n2; ++k) {
                const int k1 = j + k;
                const int k2 = (n1 - j) + (n2 - k);
                Amplitude coef = binomial(n1, j) * binomial(n2, k) *
                                 std::pow(u11, j) * std::pow(u21, n1 - j) *
                                 std::pow(u12, k) * std::pow(u22, n2 - k);
                coef *= std::sqrt(factorial(k1) * factorial(k2) /
                                  (factorial(n1) * factorial(n2)));
                Occupation res = occ;
                res[m1] = k1;
                res[m2] = k2;
                out.amps[res] += a * coef;
            }
        }
    }
}

FewPhotonState apply_beamsplitter(const FewPhotonState& s, int mode1, int mode2,
                                  double transmissivity) {
    check_mode(s, mode1);
    check_mode(s, mode2);
    if (mode1 == mode2) throw std::invalid_argument("beamsplitter modes must differ");
    if (transmissivity < 0 || transmissivity > 1)
        throw std::invalid_argument("transmissivity must lie in [0,1]");
    const double t = std::sqrt(transmissivity);
    const double r = std::sqrt(1.0 - transmissivity);
    const Amplitude ir(0.0, r);
    FewPhotonState out;
    out.n_modes = s.n_modes;
    two_mode_linear(s, mode1, mode2, t, ir, ir, t, out);
    out.prune();
    return out;
}

FewPhotonState apply_phase(const FewPhotonState& s, int mode, double phase) {
    check_mode(s, mode);
    FewPhotonState out = s;
    for (auto& [occ, a] : out.amps)
        a *= std::exp(Amplitude(0.0, phase * occ[mode]));
    return out;
}

FewPhotonState apply_loss(const FewPhotonState& s, int mode, double transmission) {
    check_mode(s, mode);
    if (transmission < 0 || transmission > 1)
        throw std::invalid_argument("transmission must lie in [0,1]");
    FewPhotonState work = s;
    const int loss_mode = work.add_mode();
    const double t = std::sqrt(transmission);
    const double r = std::sqrt(1.0 - transmission);
    FewPhotonState out;
    out.n_modes = work.n_modes;
    // real couplings; the lost branch never interferes with anything
    two_mode_linear(work, mode, loss_mode, t, r, -r, t, out);
    out.prune();
    return out;
}

FewPhotonState apply_nonlinear_element(const FewPhotonState& s,
                                       const std::vector<int>& modes,
                                       const NonlinearParams& params,
                                       double delta) {
    params.validate();
    for (int m : modes) check_mode(s, m);
    FewPhotonState work = s;
    std::vector<int> loss_modes(modes.size());
    for (size_t i = 0; i < modes.size(); ++i) loss_modes[i] = work.add_mode();

    FewPhotonState out;
    out.n_modes = work.n_modes;
    for (auto& [occ, a] : work.amps) {
        int m_total = 0;
        for (int m : modes) m_total += occ[m];
        if (m_total == 0) {
            out.amps[occ] += a;
            continue;
        }
        const double phi = phase_per_photon(m_total, delta, params);
        const double t = transmission_amplitude(m_total, delta, params);
        const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
        const Amplitude tau = t * std::exp(Amplitude(0.0, phi));
        // expand each target mode independently into its loss mode
        std::map<Occupation, Amplitude> branch{{occ, a}};
        for (size_t i = 0; i < modes.size(); ++i) {
            std::map<Occupation, Amplitude> next;
            for (auto& [bocc, ba] : branch) {
                const int n = bocc[modes[i]];
                for (int lost = 0; lost <= n; ++lost) {
                    Amplitude coef = std::sqrt(binomial(n, lost)) *
                                     std::pow(tau, n - lost) * std::pow(r, lost);
                    Occupation res = bocc;
                    res[modes[i]] = n - lost;
                    res[loss_modes[i]] += lost;
                    next[res] += ba * coef;
                }
            }
            branch = std::move(next);
        }
        for (auto& [bocc, ba] : branch) out.amps[bocc] += ba;
    }
    out.prune();
    return out;
}

SourceSpec stark_tune(const SourceSpec& s, double offset) {
    SourceSpec out = s;
    out.stark_offset += offset;
    return out;
}

double wavepacket_overlap_sq(const SourceSpec& a, const SourceSpec& b) {
    const double g1 = a.linewidth, g2 = b.linewidth;
    if (g1 <= 0 || g2 <= 0) throw std::invalid_argument("linewidths must be positive");
    const double d = a.emitted_frequency() - b.emitted_frequency();
    const double half_sum = 0.5 * (g1 + g2);
    return g1 * g2 / (half_sum * half_sum + d * d);
}

double hom_coincidence(const SourceSpec& source1, const SourceSpec& source2) {
    const double v = wavepacket_overlap_sq(source1, source2);
    // two-species decomposition: photon 2 = sqrt(V) * (same wavepacket as 1)
    // + sqrt(1-V) * (orthogonal). Modes: 0 = A/species0, 1 = B/species0,
    // 2 = A/species1, 3 = B/species1.
    FewPhotonState s;
    s.n_modes = 4;
    s.amps[{1, 1, 0, 0}] = std::sqrt(v);
    s.amps[{1, 0, 0, 1}] = std::sqrt(1.0 - v);
    s = apply_beamsplitter(s, 0, 1, 0.5);
    s = apply_beamsplitter(s, 2, 3, 0.5);
    double pc = 0;
    for (auto& [occ, a] : s.amps)
        if (occ[0] + occ[2] == 1 && occ[1] + occ[3] == 1) pc += std::norm(a);
    return pc;
}

MzGateResult run_mz_gate(const SourceSpec& probe, bool pump_present,
                         const NonlinearParams& params, double delta) {
    (void)probe;  // spectral metadata does not enter the simultaneous-pulse model
    const int n_modes = pump_present ? 3 : 2;
    FewPhotonState s = FewPhotonState::single_photon(n_modes, 0);
    if (pump_present) {
        Occupation occ(n_modes, 0);
        occ[0] = 1;
        occ[2] = 1;
        s.amps.clear();
        s.amps[occ] = 1.0;
    }
    s = apply_beamsplitter(s, 0, 1, 0.5);
    std::vector<int> element_modes{1};
    if (pump_present) element_modes.push_back(2);
    s = apply_nonlinear_element(s, element_modes, params, delta);
    s = apply_beamsplitter(s, 0, 1, 0.5);

    MzGateResult r;
    r.pump_present = pump_present;
    r.p_detector0 = s.mode_occupation_probability(1, 1);
    r.p_detector1 = s.mode_occupation_probability(0, 1);
    r.p_lost = 1.0 - r.p_detector0 - r.p_detector1;
    r.phi_applied = phase_per_photon(pump_present ? 2 : 1, delta, params);
    return r;
}

}  // namespace molwg
