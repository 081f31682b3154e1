#include "molwg/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace molwg {

void EmitterParams::validate() const {
    if (gamma_total <= 0) throw std::invalid_argument("gamma_total must be positive");
    if (eta < 0 || eta > 1) throw std::invalid_argument("eta must lie in [0,1]");
    const double n2 = dipole_orientation[0] * dipole_orientation[0] +
                      dipole_orientation[1] * dipole_orientation[1] +
                      dipole_orientation[2] * dipole_orientation[2];
    if (std::abs(n2 - 1.0) > 1e-12)
        throw std::invalid_argument("dipole orientation must be a unit vector");
    if (wavelength <= 0) throw std::invalid_argument("wavelength must be positive");
    if (dipole_moment && *dipole_moment <= 0)
        throw std::invalid_argument("dipole moment must be positive");
}

double EmitterParams::dx_over_d_sq() const {
    return dipole_orientation[0] * dipole_orientation[0];
}

double local_field_factor(double n) {
    if (n < 1) throw std::invalid_argument("refractive index must be >= 1");
    const double f = (n * n + 2.0) / 3.0;
    return f * f;
}

double gamma_wg(const EmitterParams& p, double n, double a_eff, double v_g) {
    p.validate();
    if (a_eff <= 0 || v_g <= 0)
        throw std::invalid_argument("a_eff and v_g must be positive");
    if (!p.dipole_moment)
        throw std::invalid_argument(
            "gamma_wg needs the dipole moment; use coupling_ratio for the "
            "magnitude-free ratio");
    const double dx = *p.dipole_moment * p.dipole_orientation[0];
    const double w = omega_from_wavelength(p.wavelength);
    return dx * dx * w / (2.0 * hbar * n * n * eps0 * a_eff * v_g) *
           local_field_factor(n);
}

double gamma_rad(const EmitterParams& p, double n) {
    p.validate();
    if (!p.dipole_moment)
        throw std::invalid_argument("gamma_rad needs the dipole moment");
    const double d = *p.dipole_moment;
    const double w = omega_from_wavelength(p.wavelength);
    return d * d * w * w * w / (3.0 * pi * hbar * eps0 * c_light * c_light * c_light) *
           n * local_field_factor(n);
}

double coupling_ratio(double dx_over_d_sq, double wavelength, double n,
                      double a_eff, double v_g) {
    if (a_eff <= 0 || v_g <= 0)
        throw std::invalid_argument("a_eff and v_g must be positive");
    const double sigma = 3.0 * wavelength * wavelength / (2.0 * pi * n * n);
    return 0.25 * dx_over_d_sq * sigma * (c_light / n) / (a_eff * v_g);
}

double guided_fraction(double ratio, double total_rate_correction) {
    if (ratio < 0) throw std::invalid_argument("ratio must be >= 0");
    if (total_rate_correction <= 0)
        throw std::invalid_argument("total_rate_correction must be positive");
    return 2.0 * ratio / total_rate_correction;
}

double mirror_enhancement(double ratio, double total_rate_correction) {
    if (ratio < 0) throw std::invalid_argument("ratio must be >= 0");
    if (total_rate_correction <= 0)
        throw std::invalid_argument("total_rate_correction must be positive");
    return 4.0 * ratio / total_rate_correction;
}

double zpl_cross_section(double wavelength) {
    if (wavelength <= 0) throw std::invalid_argument("wavelength must be positive");
    return 3.0 * wavelength * wavelength / (2.0 * pi);
}

double density_of_states(double length, double v_g) {
    if (length <= 0 || v_g <= 0)
        throw std::invalid_argument("length and v_g must be positive");
    return length / (2.0 * pi * v_g);
}

CouplingResult coupling_report(const EmitterParams& p, double n, double a_eff,
                               double v_g, double total_rate_correction) {
    p.validate();
    CouplingResult r;
    r.a_eff = a_eff;
    r.group_velocity = v_g;
    r.matrix_index = n;
    r.local_field_factor = local_field_factor(n);
    r.total_rate_correction = total_rate_correction;
    r.ratio = coupling_ratio(p.dx_over_d_sq(), p.wavelength, n, a_eff, v_g);
    if (p.dipole_moment) {
        r.gamma_wg = gamma_wg(p, n, a_eff, v_g);
        r.gamma_rad = gamma_rad(p, n);
    }
    r.guided_fraction = guided_fraction(r.ratio, total_rate_correction);
    r.mirror_enhanced_fraction = mirror_enhancement(r.ratio, total_rate_correction);
    return r;
}

}  // namespace molwg
