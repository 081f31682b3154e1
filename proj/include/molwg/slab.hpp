#pragma once

#include <vector>

#include "molwg/units.hpp"

// Fundamental TE mode of an asymmetric three-layer slab, by root-finding on
// the slab dispersion relation. Used as the guided-mode template for the 2D
// FDTD overlap analysis and for Bragg quarter-wave sizing.

namespace molwg {

struct SlabStack {
    double n_substrate = 1.445;
    double n_core = 2.0;
    double n_cladding = 1.434;
    double core_thickness = 120 * nm;  // core occupies -core_thickness < y < 0
};

struct SlabMode {
    double n_eff = 0.0;
    double beta = 0.0;  // rad/m
    // profile sampled on a uniform 1D grid in y
    std::vector<double> y;
    std::vector<double> field;  // TE transverse E, unit peak
};

// Effective index of the fundamental TE mode; throws std::runtime_error when
// the stack is below cutoff (no guided solution).
double slab_te0_neff(const SlabStack& stack, double wavelength);

// Mode profile on [y_lo, y_hi] with the given sample spacing.
SlabMode solve_slab_mode_1d(const SlabStack& stack, double wavelength,
                            double y_lo, double y_hi, double dy);

}  // namespace molwg
