#pragma once

// Physical constants (SI, CODATA 2018) and unit helpers.

namespace molwg {

inline constexpr double c_light  = 299792458.0;        // m/s
inline constexpr double hbar     = 1.054571817e-34;    // J s
inline constexpr double eps0     = 8.8541878128e-12;   // F/m
inline constexpr double mu0      = 1.25663706212e-6;   // H/m
inline constexpr double pi       = 3.14159265358979323846;

inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;

// free-space angular frequency for vacuum wavelength lambda (m)
inline constexpr double omega_from_wavelength(double lambda) {
    return 2.0 * pi * c_light / lambda;
}

}  // namespace molwg
