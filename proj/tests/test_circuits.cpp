#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "molwg/circuits.hpp"

using namespace molwg;

namespace {

using Cx = std::complex<double>;
using Matrix = std::vector<std::vector<Cx>>;

// Independent oracle for linear circuits: track the single-photon mode matrix
// U (creation operators transform as a_j^+ -> sum_k U[k][j] a_k^+) and expand
// one- and two-photon outputs by brute-force enumeration.
struct MatrixCircuit {
    Matrix u;

    explicit MatrixCircuit(int n) : u(n, std::vector<Cx>(n, 0.0)) {
        for (int i = 0; i < n; ++i) u[i][i] = 1.0;
    }
    int n() const { return static_cast<int>(u.size()); }

    void left_multiply_two_mode(int m1, int m2, Cx u11, Cx u21, Cx u12, Cx u22) {
        for (int j = 0; j < n(); ++j) {
            const Cx a = u[m1][j], b = u[m2][j];
            u[m1][j] = u11 * a + u12 * b;
            u[m2][j] = u21 * a + u22 * b;
        }
    }
    void beamsplitter(int m1, int m2, double T) {
        const double t = std::sqrt(T), r = std::sqrt(1.0 - T);
        left_multiply_two_mode(m1, m2, t, Cx(0, r), Cx(0, r), t);
    }
    void phase(int m, double phi) {
        const Cx f = std::exp(Cx(0, phi));
        for (int j = 0; j < n(); ++j) u[m][j] *= f;
    }
    int add_mode() {
        for (auto& row : u) row.push_back(0.0);
        u.emplace_back(n() + 1, 0.0);
        u.back().back() = 1.0;
        return n() - 1;
    }
    void loss(int m, double T) {
        const int lm = add_mode();
        const double t = std::sqrt(T), r = std::sqrt(1.0 - T);
        left_multiply_two_mode(m, lm, t, r, -r, t);
    }

    Cx single_amp(int in, int out) const { return u[out][in]; }
    // pair launched in distinct modes j1 != j2
    Cx pair_amp(int j1, int j2, const Occupation& occ) const {
        int k = -1, l = -1;
        for (int m = 0; m < n(); ++m) {
            if (occ[m] == 2) { k = l = m; }
            else if (occ[m] == 1) { (k < 0 ? k : l) = m; }
        }
        if (k == l) return std::sqrt(2.0) * u[k][j1] * u[k][j2];
        return u[k][j1] * u[l][j2] + u[l][j1] * u[k][j2];
    }
};

struct Element {
    enum Kind { BS, Phase, Loss } kind;
    int m1 = 0, m2 = 0;
    double value = 0;
};

FewPhotonState run_engine(FewPhotonState s, const std::vector<Element>& seq) {
    for (const auto& e : seq) {
        switch (e.kind) {
            case Element::BS: s = apply_beamsplitter(s, e.m1, e.m2, e.value); break;
            case Element::Phase: s = apply_phase(s, e.m1, e.value); break;
            case Element::Loss: s = apply_loss(s, e.m1, e.value); break;
        }
    }
    return s;
}

MatrixCircuit run_oracle(int n, const std::vector<Element>& seq) {
    MatrixCircuit c(n);
    for (const auto& e : seq) {
        switch (e.kind) {
            case Element::BS: c.beamsplitter(e.m1, e.m2, e.value); break;
            case Element::Phase: c.phase(e.m1, e.value); break;
            case Element::Loss: c.loss(e.m1, e.value); break;
        }
    }
    return c;
}

void compare_single(int n, int in_mode, const std::vector<Element>& seq) {
    MatrixCircuit c = run_oracle(n, seq);
    FewPhotonState s = run_engine(FewPhotonState::single_photon(n, in_mode), seq);
    CHECK(s.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < c.n(); ++k) {
        Occupation occ(c.n(), 0);
        occ[k] = 1;
        const auto it = s.amps.find(occ);
        const Cx got = it == s.amps.end() ? Cx(0) : it->second;
        const Cx want = c.single_amp(in_mode, k);
        CHECK(std::abs(got - want) < 1e-9);
    }
}

void compare_pair(int n, int j1, int j2, const std::vector<Element>& seq) {
    MatrixCircuit c = run_oracle(n, seq);
    FewPhotonState s = run_engine(FewPhotonState::photon_pair(n, j1, j2), seq);
    CHECK(s.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < c.n(); ++k) {
        for (int l = k; l < c.n(); ++l) {
            Occupation occ(c.n(), 0);
            occ[k] += 1;
            occ[l] += 1;
            const auto it = s.amps.find(occ);
            const Cx got = it == s.amps.end() ? Cx(0) : it->second;
            CHECK(std::abs(got - c.pair_amp(j1, j2, occ)) < 1e-9);
        }
    }
}

}  // namespace

TEST_CASE("engine matches the single-photon matrix oracle") {
    const std::vector<std::vector<Element>> circuits = {
        {{Element::BS, 0, 1, 0.5}},
        {{Element::BS, 0, 1, 0.7}, {Element::Phase, 1, 0, 1.1}},
        {{Element::BS, 0, 1, 0.5}, {Element::Loss, 1, 0, 0.8},
         {Element::BS, 0, 1, 0.5}},
        {{Element::Phase, 0, 0, 0.4}, {Element::BS, 0, 2, 0.3},
         {Element::BS, 1, 2, 0.6}, {Element::Loss, 0, 0, 0.9},
         {Element::Phase, 2, 0, 2.2}},
        {{Element::Loss, 0, 0, 0.5}, {Element::Loss, 1, 0, 0.25},
         {Element::BS, 0, 1, 0.5}, {Element::Phase, 0, 0, 3.0},
         {Element::BS, 0, 1, 0.5}},
    };
    for (const auto& seq : circuits) {
        compare_single(3, 0, seq);
        compare_single(3, 1, seq);
        compare_pair(3, 0, 1, seq);
        compare_pair(3, 0, 2, seq);
    }
}

TEST_CASE("two-photon interference on a balanced splitter") {
    FewPhotonState s = FewPhotonState::photon_pair(2, 0, 1);
    s = apply_beamsplitter(s, 0, 1, 0.5);
    // indistinguishable pair bunches: no coincidences
    Occupation coincidence{1, 1};
    CHECK(s.amps.find(coincidence) == s.amps.end());
    CHECK(s.mode_occupation_probability(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.mode_occupation_probability(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("loss channel bookkeeping") {
    FewPhotonState s = FewPhotonState::single_photon(1, 0);
    s = apply_loss(s, 0, 0.7);
    CHECK(s.n_modes == 2);
    CHECK(s.mode_occupation_probability(0, 1) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s.mode_occupation_probability(1, 1) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nonlinear element is a unitary dilation") {
    NonlinearParams p;
    for (double x : {0.0, 0.5, 1.3}) {
        FewPhotonState s = FewPhotonState::photon_pair(3, 1, 2);
        s = apply_beamsplitter(s, 0, 1, 0.5);
        s = apply_nonlinear_element(s, {1, 2}, p, x * p.gamma);
        CHECK(s.total_probability() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("nonlinear element phase and transmission on one photon") {
    NonlinearParams p;
    const double d = 0.62 * p.gamma;
    FewPhotonState s = FewPhotonState::single_photon(1, 0);
    s = apply_nonlinear_element(s, {0}, p, d);
    Occupation kept{1, 0};
    REQUIRE(s.amps.count(kept) == 1);
    const Cx amp = s.amps.at(kept);
    const double t = transmission_amplitude(1, d, p);
    CHECK(std::abs(amp) == doctest::Approx(t).epsilon(1e-12));
    CHECK(std::arg(amp) == doctest::Approx(phase_per_photon(1, d, p)).epsilon(1e-12));
}

TEST_CASE("wavepacket overlap") {
    SourceSpec a, b;
    CHECK(wavepacket_overlap_sq(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    // the offset rides on an optical carrier ~1e15 rad/s, so the frequency
    // difference is only good to ~1e-8 relative
    b = stark_tune(b, a.linewidth);
    CHECK(wavepacket_overlap_sq(a, b) == doctest::Approx(0.5).epsilon(1e-8));
    SUBCASE("unequal linewidths") {
        SourceSpec wide = a;
        wide.linewidth = 3 * a.linewidth;
        const double g1 = a.linewidth, g2 = wide.linewidth;
        const double want = g1 * g2 / (0.25 * (g1 + g2) * (g1 + g2));
        CHECK(wavepacket_overlap_sq(a, wide) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("HOM coincidences") {
    SourceSpec a, b;
    CHECK(hom_coincidence(a, b) == doctest::Approx(0.0).epsilon(1e-12));

    SourceSpec detuned = stark_tune(b, a.linewidth);
    CHECK(hom_coincidence(a, detuned) == doctest::Approx(0.25).epsilon(1e-8));

    // engine agrees with the closed form for arbitrary offsets
    for (double x : {0.3, 1.7, 6.0}) {
        SourceSpec far = stark_tune(b, x * a.linewidth);
        const double v = wavepacket_overlap_sq(a, far);
        CHECK(hom_coincidence(a, far) ==
              doctest::Approx(0.5 * (1.0 - v)).epsilon(1e-12));
    }

    SourceSpec distinguishable = stark_tune(b, 1e4 * a.linewidth);
    CHECK(hom_coincidence(a, distinguishable) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("MZ gate matches the closed form") {
    NonlinearParams p;
    SourceSpec probe;
    for (double x : {0.2, 0.8, 1.5}) {
        const double d = x * p.gamma;
        const double t1 = transmission_amplitude(1, d, p);
        const double t2 = transmission_amplitude(2, d, p);
        const Cx tau1 = t1 * std::exp(Cx(0, phase_per_photon(1, d, p)));
        const Cx tau2 = t2 * std::exp(Cx(0, phase_per_photon(2, d, p)));
        const double r1 = std::sqrt(1.0 - t1 * t1);
        const double r2 = std::sqrt(1.0 - t2 * t2);

        SUBCASE("probe alone") {
            MzGateResult r = run_mz_gate(probe, false, p, d);
            CHECK(r.p_detector0 ==
                  doctest::Approx(0.25 * std::norm(1.0 + tau1)).epsilon(1e-9));
            CHECK(r.p_detector1 ==
                  doctest::Approx(0.25 * std::norm(1.0 - tau1)).epsilon(1e-9));
            CHECK(r.p_detector0 + r.p_detector1 + r.p_lost ==
                  doctest::Approx(1.0).epsilon(1e-12));
            CHECK(r.phi_applied == doctest::Approx(phase_per_photon(1, d, p)));
        }
        SUBCASE("with the pump") {
            // lower arm carries the pump through as m = 1 (factor tau1 or
            // loss r1); upper arm is the m = 2 branch (tau2 per photon).
            // Detector amplitudes, summed over the orthogonal pump outcomes:
            MzGateResult r = run_mz_gate(probe, true, p, d);
            const double p0 = 0.25 * (std::norm(tau1 + tau2 * tau2) +
                                      std::norm(r1 + tau2 * r2));
            const double p1 = 0.25 * (std::norm(tau1 - tau2 * tau2) +
                                      std::norm(r1 - tau2 * r2));
            CHECK(r.p_detector0 == doctest::Approx(p0).epsilon(1e-9));
            CHECK(r.p_detector1 == doctest::Approx(p1).epsilon(1e-9));
            CHECK(r.p_detector0 + r.p_detector1 + r.p_lost ==
                  doctest::Approx(1.0).epsilon(1e-12));
            CHECK(r.p_lost >= 0.0);
            CHECK(r.phi_applied == doctest::Approx(phase_per_photon(2, d, p)));
        }
    }
    // no molecule interaction: everything exits at detector 0
    NonlinearParams off = p;
    off.gamma_wg_fraction = 0.0;
    MzGateResult r = run_mz_gate(probe, false, off, 0.5 * p.gamma);
    CHECK(r.p_detector0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.p_lost == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pump changes the probe routing") {
    NonlinearParams p;
    SourceSpec probe;
    const double d = 0.5 * p.gamma;
    MzGateResult solo = run_mz_gate(probe, false, p, d);
    MzGateResult pumped = run_mz_gate(probe, true, p, d);
    CHECK(std::abs(pumped.p_detector1 - solo.p_detector1) > 1e-3);
    CHECK(std::abs(pumped.phi_applied) < std::abs(solo.phi_applied));
}

TEST_CASE("argument validation") {
    FewPhotonState s = FewPhotonState::single_photon(2, 0);
    CHECK_THROWS_AS(apply_beamsplitter(s, 0, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(apply_beamsplitter(s, 0, 2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(apply_beamsplitter(s, 0, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(apply_loss(s, 0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_phase(s, 5, 0.3), std::invalid_argument);
}
