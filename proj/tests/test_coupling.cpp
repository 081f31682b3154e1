#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "molwg/coupling.hpp"

using namespace molwg;

TEST_CASE("local field factor") {
    CHECK(local_field_factor(1.0) == doctest::Approx(1.0));
    const double n = 1.434;
    const double f = (n * n + 2) / 3.0;
    CHECK(local_field_factor(n) == doctest::Approx(f * f).epsilon(1e-14));
}

TEST_CASE("coupling ratio for the reference operating point") {
    // x dipole, n = 1.434, A_eff = 0.42 lambda^2, v_g = c/n
    const double lam = 785 * nm, n = 1.434;
    const double r = coupling_ratio(1.0, lam, n, 0.42 * lam * lam, c_light / n);
    CHECK(r == doctest::Approx(0.138).epsilon(0.005 / 0.138));

    // closed form: lambda^2 and c/n cancel against A_eff and v_g
    const double expect = 0.25 * 3.0 / (2 * pi * n * n) / 0.42;
    CHECK(r == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ratio equals the quotient of the explicit rates") {
    EmitterParams p;
    p.dipole_moment = 2.0e-29;
    const double n = 1.434, lam = p.wavelength;
    const double a_eff = 0.42 * lam * lam, v_g = c_light / n;

    const double gw = gamma_wg(p, n, a_eff, v_g);
    const double gr = gamma_rad(p, n);
    CHECK(gw > 0);
    CHECK(gr > 0);
    const double r = coupling_ratio(p.dx_over_d_sq(), lam, n, a_eff, v_g);
    CHECK(gw / gr == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("explicit rate formulas") {
    EmitterParams p;
    p.dipole_moment = 1.5e-29;
    const double n = 1.434, lam = p.wavelength;
    const double a_eff = 0.42 * lam * lam, v_g = c_light / n;
    const double w = omega_from_wavelength(lam);
    const double d = *p.dipole_moment;
    const double lf = local_field_factor(n);

    const double gw_ref = d * d * w / (2 * hbar * n * n * eps0 * a_eff * v_g) * lf;
    const double gr_ref = d * d * w * w * w / (3 * pi * hbar * eps0 *
                          c_light * c_light * c_light) * n * lf;
    CHECK(gamma_wg(p, n, a_eff, v_g) == doctest::Approx(gw_ref).epsilon(1e-12));
    CHECK(gamma_rad(p, n) == doctest::Approx(gr_ref).epsilon(1e-12));
}

TEST_CASE("dipole orientation scales the guided rate only") {
    EmitterParams px;
    px.dipole_moment = 2.0e-29;
    EmitterParams tilted = px;
    tilted.dipole_orientation = {std::sqrt(0.5), std::sqrt(0.5), 0.0};
    const double n = 1.434, lam = px.wavelength;
    const double a_eff = 0.42 * lam * lam, v_g = c_light / n;

    CHECK(tilted.dx_over_d_sq() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gamma_wg(tilted, n, a_eff, v_g) ==
          doctest::Approx(0.5 * gamma_wg(px, n, a_eff, v_g)).epsilon(1e-12));
    CHECK(gamma_rad(tilted, n) == doctest::Approx(gamma_rad(px, n)).epsilon(1e-12));
}

TEST_CASE("guided fraction and mirror enhancement bookkeeping") {
    CHECK(guided_fraction(0.14, 1.0) == doctest::Approx(0.28).epsilon(1e-14));
    CHECK(mirror_enhancement(0.14, 1.0) == doctest::Approx(0.56).epsilon(1e-14));
    // total-rate correction divides both
    CHECK(guided_fraction(0.14, 1.05) == doctest::Approx(0.28 / 1.05).epsilon(1e-14));
    CHECK(mirror_enhancement(0.14, 1.05) == doctest::Approx(0.56 / 1.05).epsilon(1e-14));
}

TEST_CASE("ZPL cross section and density of states") {
    const double lam = 785 * nm;
    CHECK(zpl_cross_section(lam) == doctest::Approx(3 * lam * lam / (2 * pi)).epsilon(1e-14));
    const double L = 1e-3, vg = 2e8;
    CHECK(density_of_states(L, vg) == doctest::Approx(L / (2 * pi * vg)).epsilon(1e-14));
}

TEST_CASE("full report") {
    EmitterParams p;
    const double n = 1.434, lam = p.wavelength;
    const double a_eff = 0.42 * lam * lam, v_g = c_light / n;
    CouplingResult r = coupling_report(p, n, a_eff, v_g);

    CHECK(r.ratio == doctest::Approx(coupling_ratio(1.0, lam, n, a_eff, v_g)).epsilon(1e-12));
    CHECK(r.guided_fraction == doctest::Approx(2 * r.ratio).epsilon(1e-12));
    CHECK(r.mirror_enhanced_fraction == doctest::Approx(4 * r.ratio).epsilon(1e-12));
    CHECK(r.local_field_factor == doctest::Approx(local_field_factor(n)).epsilon(1e-12));
    CHECK(r.a_eff == a_eff);
    CHECK(r.group_velocity == v_g);
    // no dipole magnitude set: absolute rates stay at zero
    CHECK(r.gamma_wg == 0.0);
    CHECK(r.gamma_rad == 0.0);
}

TEST_CASE("validation") {
    EmitterParams p;
    SUBCASE("eta outside [0,1]") {
        p.eta = 1.5;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("non-positive rate") {
        p.gamma_total = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("zero orientation vector") {
        p.dipole_orientation = {0, 0, 0};
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("gamma_wg needs a dipole magnitude") {
        CHECK_THROWS_AS(gamma_wg(p, 1.434, 1e-13, 2e8), std::invalid_argument);
    }
}
