#pragma once

#include <array>
#include <optional>

#include "molwg/units.hpp"

// Golden-rule emission rates of a dipole near the guide: rate into one guided
// direction, radiative rate in the bulk matrix, their ratio, guided-photon
// fractions and the mirror-enhancement bookkeeping. All rates are angular
// (rad/s).

namespace molwg {

struct EmitterParams {
    double gamma_total = 2 * pi * 30e6;          // rad/s
    double eta = 0.5;                            // ZPL branching ratio
    std::array<double, 3> dipole_orientation{1, 0, 0};  // unit vector, x = guide TE axis
    double wavelength = 785 * nm;
    std::optional<double> dipole_moment;         // C m; ratio-based ops do not need it

    void validate() const;  // throws std::invalid_argument
    double dx_over_d_sq() const;                 // d_x^2/d^2 = orientation_x^2
};

struct CouplingResult {
    double gamma_wg = 0;            // rad/s, one direction (0 when d unknown)
    double gamma_rad = 0;           // rad/s (0 when d unknown)
    double ratio = 0;               // gamma_wg / gamma_rad
    double guided_fraction = 0;     // both directions
    double mirror_enhanced_fraction = 0;
    double local_field_factor = 0;
    double total_rate_correction = 1.0;
    double a_eff = 0;               // m^2, inputs echoed for audit
    double group_velocity = 0;      // m/s
    double matrix_index = 0;
};

// ((n^2+2)/3)^2
double local_field_factor(double n);

// Emission rate into one guided direction:
//   Gamma_wg = d_x^2 w / (2 hbar n^2 eps0 A_eff v_g) * ((n^2+2)/3)^2
// Throws std::invalid_argument when no dipole moment is set (use
// coupling_ratio for the magnitude-free path).
double gamma_wg(const EmitterParams& p, double n, double a_eff, double v_g);

// Radiative rate in the homogeneous matrix:
//   Gamma_rad = d^2 w^3 / (3 pi hbar eps0 c^3) * n * ((n^2+2)/3)^2
double gamma_rad(const EmitterParams& p, double n);

// Gamma_wg/Gamma_rad without the dipole magnitude:
//   (1/4)(d_x^2/d^2) (3 lambda^2/(2 pi n^2)) (c/n) / (A_eff v_g)
double coupling_ratio(double dx_over_d_sq, double wavelength, double n,
                      double a_eff, double v_g);

// Fraction of emitted photons entering the guide (both directions):
// 2*ratio / total_rate_correction, where the correction is
// Gamma_total/Gamma_rad in the structured environment.
double guided_fraction(double ratio, double total_rate_correction = 1.05);

// One-direction output fraction with an ideal mirror at an antinode:
// 4*ratio / total_rate_correction (the idealized 4*Gamma_wg relative to
// Gamma_rad at correction 1).
double mirror_enhancement(double ratio, double total_rate_correction = 1.0);

// Free-space ZPL cross section 3 lambda^2 / (2 pi).
double zpl_cross_section(double wavelength);

// One-direction longitudinal density of states L/(2 pi v_g). L cancels in the
// golden-rule product |g|^2 D, so the emission rates are L-free.
double density_of_states(double length, double v_g);

// Full report for a given matrix index, mode area and group velocity.
CouplingResult coupling_report(const EmitterParams& p, double n, double a_eff,
                               double v_g, double total_rate_correction = 1.0);

}  // namespace molwg
