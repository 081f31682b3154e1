#pragma once

#include <string>
#include <vector>

#include "molwg/geometry.hpp"
#include "molwg/slab.hpp"

// Full-vector finite-difference eigenmode solver for the 2D cross-section.
// The transverse E components are discretized on the cell-centered grid with
// flux-form sampling of eps across interfaces (continuity of the normal D
// component), giving the operator
//
//   beta^2 Ex = dx[(1/e) dx(e Ex)] + dyy Ex + k^2 e Ex + dx[(1/e) dy(e Ey) - dy Ey]
//   beta^2 Ey = dy[(1/e) dy(e Ey)] + dxx Ey + k^2 e Ey + dy[(1/e) dx(e Ex) - dx Ex]
//
// solved by shift-invert Arnoldi (sparse LU) targeting effective indices just
// below the core index. Outer boundaries are zero-field (Dirichlet).

namespace molwg {

struct GuidedMode {
    double n_eff = 0;
    double beta = 0;          // rad/m
    double wavelength = 0;
    Grid2D grid;
    // real field amplitudes at cell centers (Ez is the 90-degree out-of-phase
    // longitudinal component reconstructed from div(eps E) = 0)
    std::vector<double> ex, ey, ez;
    std::string polarization;  // "quasi-TE" or "quasi-TM"
    double residual = 0;       // ||A f - beta^2 f|| / ||f||

    double field_sq(int i, int j) const;  // |E|^2 at a node
};

struct ModeAreaResult {
    double a_eff = 0;              // m^2
    double a_eff_over_lambda_sq = 0;
    EmitterLocation r0;
    double field_sq_at_r0 = 0;     // |E(r0)|^2 relative to unit peak
};

struct GroupVelocityResult {
    double v_g = 0;  // m/s
    double n_eff_plus = 0;
    double n_eff_minus = 0;
    double delta_omega = 0;  // rad/s, full width of the centered difference
};

struct ModeSolverOptions {
    int krylov_dim = 48;
    int max_krylov_dim = 160;
    double residual_tol = 1e-9;
};

// Guided modes sorted by descending effective index, fields normalized to
// unit peak |E|. Throws std::runtime_error with "cutoff" when no guided mode
// exists, or a diagnostic when the eigensolver fails to converge.
std::vector<GuidedMode> solve_modes(const WaveguideSpec& spec, const Grid2D& grid,
                                    int count, const ModeSolverOptions& opts = {});

// Emitter-normalized area: midpoint quadrature of eps|E|^2 over the window divided by
// eps(r0)|E(r0)|^2 (bilinear interpolation of each component at r0).
ModeAreaResult effective_mode_area(const GuidedMode& mode, const ScalarField2D& eps,
                                   const EmitterLocation& r0);

// Centered finite difference of beta over omega(1 +- h), default h = 0.5%.
// Homogeneous specs take the analytic plane-wave path v_g = c/n.
GroupVelocityResult group_velocity(const WaveguideSpec& spec, const Grid2D& grid,
                                   double relative_step = 0.005);

// CSV dump: x[m], y[m], Re/Im of Ex, Ey, Ez.
std::string mode_field_csv(const GuidedMode& mode);

// Normalized overlap |<f,g>| / (||f|| ||g||) of two modes' transverse fields.
double mode_overlap(const GuidedMode& a, const GuidedMode& b);

}  // namespace molwg
