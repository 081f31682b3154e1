#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "molwg/mode_solver.hpp"

using namespace molwg;

// The solver runs cost seconds each, so the cases here use 20 nm grids and
// reduced windows unless the check itself is about resolution.

TEST_CASE("strip fundamental mode") {
    WaveguideSpec s = WaveguideSpec::reference_strip();
    Grid2D g = Grid2D::for_spec(s, 20 * nm);
    auto modes = solve_modes(s, g, 1);
    REQUIRE(modes.size() == 1);
    const GuidedMode& m = modes[0];

    CHECK(m.residual < 1e-9);
    CHECK(m.polarization == "quasi-TE");
    CHECK(m.n_eff > 1.445);
    CHECK(m.n_eff < 2.0);
    CHECK(m.beta == doctest::Approx(m.n_eff * 2 * pi / s.wavelength));

    SUBCASE("unit peak normalization") {
        double peak = 0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                peak = std::max(peak, m.field_sq(i, j));
        CHECK(peak == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("fields vanish toward the window edge") {
        double edge = 0;
        for (int i = 0; i < g.nx(); ++i)
            edge = std::max(edge, std::max(m.field_sq(i, 0), m.field_sq(i, g.ny() - 1)));
        CHECK(edge < 1e-4);
    }
    SUBCASE("CSV export row count") {
        std::string csv = mode_field_csv(m);
        int lines = 0;
        std::istringstream in(csv);
        for (std::string line; std::getline(in, line);) ++lines;
        CHECK(lines == g.nx() * g.ny() + 1);
    }
}

TEST_CASE("higher modes are orthogonal and ordered") {
    WaveguideSpec s = WaveguideSpec::reference_slot();
    Grid2D g = Grid2D::for_spec(s, 20 * nm);
    auto modes = solve_modes(s, g, 2, {});
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].n_eff > modes[1].n_eff);
    CHECK(modes[0].polarization == "quasi-TE");
    CHECK(modes[1].polarization == "quasi-TM");
    CHECK(mode_overlap(modes[0], modes[1]) < 1e-6);
    CHECK(mode_overlap(modes[0], modes[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("window growth leaves the converged answers alone") {
    WaveguideSpec s = WaveguideSpec::reference_slot();
    EmitterPosition pos;
    pos.in_slot = true;
    const EmitterLocation r0 = locate_emitter(s, pos);

    double n_eff[2], a_eff[2];
    int k = 0;
    for (double wx : {3.0 * um, 4.5 * um}) {
        Grid2D g = Grid2D::for_spec(s, 20 * nm, wx, 2.0 * um);
        auto modes = solve_modes(s, g, 1);
        auto eps = permittivity_map(s, g);
        n_eff[k] = modes[0].n_eff;
        a_eff[k] = effective_mode_area(modes[0], eps, r0).a_eff;
        ++k;
    }
    CHECK(std::abs(n_eff[1] - n_eff[0]) < 1e-4);
    CHECK(std::abs(a_eff[1] - a_eff[0]) / a_eff[0] < 0.02);
}

TEST_CASE("grid refinement converges the slot area") {
    WaveguideSpec s = WaveguideSpec::reference_slot();
    EmitterPosition pos;
    pos.in_slot = true;
    const EmitterLocation r0 = locate_emitter(s, pos);

    double a_eff[2];
    int k = 0;
    for (double h : {10.0 * nm, 5.0 * nm}) {
        Grid2D g = Grid2D::for_spec(s, h, 2.0 * um, 1.4 * um);
        auto modes = solve_modes(s, g, 1);
        auto eps = permittivity_map(s, g);
        a_eff[k] = effective_mode_area(modes[0], eps, r0).a_eff;
        ++k;
    }
    CHECK(std::abs(a_eff[1] - a_eff[0]) / a_eff[1] < 0.05);
}

TEST_CASE("uniform synthetic field integrates to the window area") {
    WaveguideSpec s = WaveguideSpec::reference_strip();
    Grid2D g = Grid2D::for_spec(s, 20 * nm, 1.2 * um, 0.8 * um);
    GuidedMode m;
    m.grid = g;
    m.wavelength = s.wavelength;
    const size_t n = static_cast<size_t>(g.nx()) * g.ny();
    m.ex.assign(n, 1.0);
    m.ey.assign(n, 0.0);
    m.ez.assign(n, 0.0);

    ScalarField2D eps;
    eps.grid = g;
    eps.values.assign(n, 2.25);  // uniform: the eps weights cancel

    EmitterLocation r0;
    r0.x = 0.1 * um;
    r0.y = 0.2 * um;
    r0.eps_local = 2.25;
    ModeAreaResult a = effective_mode_area(m, eps, r0);
    CHECK(a.a_eff == doctest::Approx(g.nx() * g.ny() * g.spacing * g.spacing)
                         .epsilon(1e-12));
    CHECK(a.field_sq_at_r0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("area evaluation rejects bad emitter points") {
    WaveguideSpec s = WaveguideSpec::reference_strip();
    Grid2D g = Grid2D::for_spec(s, 20 * nm, 1.2 * um, 0.8 * um);
    GuidedMode m;
    m.grid = g;
    m.wavelength = s.wavelength;
    const size_t n = static_cast<size_t>(g.nx()) * g.ny();
    m.ex.assign(n, 0.0);
    m.ey.assign(n, 0.0);
    m.ez.assign(n, 0.0);
    // field confined to the left half, identically zero on the right
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx() / 2; ++i)
            m.ex[static_cast<size_t>(j) * g.nx() + i] = 1.0;
    ScalarField2D eps;
    eps.grid = g;
    eps.values.assign(n, 2.25);

    SUBCASE("outside the window") {
        EmitterLocation r0;
        r0.x = 5 * um;
        r0.eps_local = 2.25;
        CHECK_THROWS_AS(effective_mode_area(m, eps, r0), std::invalid_argument);
    }
    SUBCASE("where the field vanishes") {
        EmitterLocation r0;
        r0.x = 0.4 * um;
        r0.y = 0.2 * um;
        r0.eps_local = 2.25;
        CHECK_THROWS_AS(effective_mode_area(m, eps, r0), std::runtime_error);
    }
}

TEST_CASE("group velocity") {
    SUBCASE("homogeneous medium gives c/n exactly") {
        WaveguideSpec s = WaveguideSpec::reference_strip();
        s.core = s.substrate = s.cladding = material_hexadecane();
        Grid2D g = Grid2D::for_spec(s, 20 * nm);
        GroupVelocityResult v = group_velocity(s, g);
        CHECK(v.v_g == doctest::Approx(c_light / 1.434).epsilon(1e-12));
    }
    SUBCASE("guided mode is slower than the phase front and step-halving agrees") {
        WaveguideSpec s = WaveguideSpec::reference_strip();
        Grid2D g = Grid2D::for_spec(s, 20 * nm, 2.4 * um, 1.6 * um);
        GroupVelocityResult v = group_velocity(s, g, 0.005);
        GroupVelocityResult v2 = group_velocity(s, g, 0.0025);
        CHECK(v.n_eff_plus > v.n_eff_minus);
        CHECK(v.v_g < c_light / v.n_eff_minus);
        CHECK(v.v_g > 0.3 * c_light);
        CHECK(v.v_g == doctest::Approx(v2.v_g).epsilon(1e-4));
    }
}

TEST_CASE("below cutoff throws") {
    WaveguideSpec s = WaveguideSpec::reference_strip();
    s.core_thickness = 10 * nm;
    s.core_width = 50 * nm;
    Grid2D g = Grid2D::for_spec(s, 20 * nm, 2.0 * um, 1.4 * um);
    CHECK_THROWS_AS(solve_modes(s, g, 1), std::runtime_error);
}
