#include "molwg/slab.hpp"

#include <cmath>
#include <stdexcept>

namespace molwg {

namespace {

// TE dispersion residual for the fundamental mode:
//   kappa*t - atan(gamma_s/kappa) - atan(gamma_c/kappa)
// monotone decreasing in n_eff on (max(ns,nc), n_core); the m=0 root has
// residual 0.
double te0_residual(const SlabStack& s, double k0, double n_eff) {
    const double b2 = n_eff * n_eff * k0 * k0;
    const double kappa = std::sqrt(std::max(s.n_core * s.n_core * k0 * k0 - b2, 0.0));
    const double gs = std::sqrt(std::max(b2 - s.n_substrate * s.n_substrate * k0 * k0, 0.0));
    const double gc = std::sqrt(std::max(b2 - s.n_cladding * s.n_cladding * k0 * k0, 0.0));
    if (kappa == 0.0) return -pi;
    return kappa * s.core_thickness - std::atan(gs / kappa) - std::atan(gc / kappa);
}

}  // namespace

double slab_te0_neff(const SlabStack& stack, double wavelength) {
    if (stack.core_thickness <= 0)
        throw std::runtime_error("slab below cutoff: vanishing core");
    const double n_lo = std::max(stack.n_substrate, stack.n_cladding);
    if (stack.n_core <= n_lo)
        throw std::runtime_error("slab below cutoff: core index not above claddings");
    const double k0 = 2 * pi / wavelength;
    double a = n_lo * (1 + 1e-12);
    double b = stack.n_core * (1 - 1e-12);
    double fa = te0_residual(stack, k0, a);
    if (fa < 0) throw std::runtime_error("slab below cutoff at this wavelength");
    // bisection: residual decreasing from fa >= 0 to negative at b
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (te0_residual(stack, k0, m) > 0)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

SlabMode solve_slab_mode_1d(const SlabStack& stack, double wavelength,
                            double y_lo, double y_hi, double dy) {
    SlabMode mode;
    mode.n_eff = slab_te0_neff(stack, wavelength);
    const double k0 = 2 * pi / wavelength;
    mode.beta = mode.n_eff * k0;
    const double b2 = mode.beta * mode.beta;
    const double kappa = std::sqrt(stack.n_core * stack.n_core * k0 * k0 - b2);
    const double gs = std::sqrt(b2 - stack.n_substrate * stack.n_substrate * k0 * k0);
    const double gc = std::sqrt(b2 - stack.n_cladding * stack.n_cladding * k0 * k0);
    const double t = stack.core_thickness;
    // core: cos(kappa*(y+t) - phi_s) with tan(phi_s) = -gs/kappa at y=-t;
    // continuity of field and derivative fixes the exterior exponentials.
    const double phi_s = std::atan(gs / kappa);
    auto profile = [&](double y) {
        if (y < -t) return std::cos(-phi_s) * std::exp(gs * (y + t));
        if (y <= 0) return std::cos(kappa * (y + t) - phi_s);
        return std::cos(kappa * t - phi_s) * std::exp(-gc * y);
    };
    const int n = static_cast<int>((y_hi - y_lo) / dy + 0.5) + 1;
    mode.y.resize(n);
    mode.field.resize(n);
    double peak = 0;
    for (int i = 0; i < n; ++i) {
        mode.y[i] = y_lo + i * dy;
        mode.field[i] = profile(mode.y[i]);
        peak = std::max(peak, std::abs(mode.field[i]));
    }
    for (double& f : mode.field) f /= peak;
    return mode;
}

}  // namespace molwg
