#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "molwg/geometry.hpp"
#include "molwg/slab.hpp"

// 2D TE (out-of-plane E) finite-difference time-domain simulation of dipole
// radiation near the longitudinal cut of the guide: substrate below, core
// layer, cladding above, propagation axis horizontal. Uniaxial PML with
// quartic grading terminates the window. Guided power is extracted by overlap
// projection onto the 1D slab mode; total power by closed-box Poynting flux
// at the source frequency via running DFTs.

namespace molwg {

struct FdtdConfig {
    double cell = 20 * nm;
    double courant = 0.65;          // fraction of cell/(c dt); 2D bound 1/sqrt(2)
    double window_x = 8 * um;
    double window_y = 4 * um;
    int pml_cells = 10;
    // source: out-of-plane point dipole, Gaussian pulse
    double source_x = 0.0;
    double source_y = 20 * nm;      // above the core top surface
    double wavelength = 785 * nm;   // carrier
    double fractional_bandwidth = 0.10;
    double source_amplitude = 1.0;  // current amplitude (arbitrary units)
    // run criterion
    double decay_threshold = 1e-4;  // stop when energy falls below this x peak
    int max_steps = 120000;
    // monitor geometry
    double box_half = 0.45 * um;    // inner closed flux box around the source
    double box_half_big = 0.9 * um; // outer self-check box
    double guided_monitor_margin = 0.4 * um;  // distance from the PML edge

    double omega0() const { return omega_from_wavelength(wavelength); }
    void validate() const;  // throws std::invalid_argument
};

// Longitudinal cut of the structure. The strip cross-section width does not
// enter; the slab layers do.
struct LongitudinalStructure {
    WaveguideSpec spec;
    bool waveguide_present = true;  // false: homogeneous cladding everywhere

    SlabStack slab() const;
    static LongitudinalStructure homogeneous(const WaveguideSpec& spec);
};

struct BraggSpec {
    int periods = 8;          // mirror trenches left of the emitter trench
    double high_length = 0;   // Si3N4 block, quarter-wave when built below
    double low_length = 0;    // mirror trench, quarter-wave
    double trench_width = 0;  // emitter trench width (defaults to low_length)
    double end_face_x = 0;    // right edge of the emitter trench

    // Quarter-wave sizing at the carrier: high block at the slab effective
    // index, trench at the cladding index.
    static BraggSpec quarter_wave(const WaveguideSpec& spec, int periods,
                                  double end_face_x, double wavelength);
    // true when x lies in any trench (core replaced by cladding there)
    bool in_trench(double x) const;
    void validate() const;
};

struct PowerReport {
    double p_total = 0;        // inner closed-box flux at the carrier
    double p_total_big = 0;    // outer box (energy-conservation self check)
    double p_left_guided = 0;
    double p_right_guided = 0;
    double p_homogeneous = 0;  // companion run without the guide
    double frequency = 0;      // rad/s
    int steps = 0;
    double box_agreement = 0;  // |p_total - p_total_big| / p_total
};

struct GuidedFractions {
    double left = 0, right = 0, total = 0;           // relative to p_total
    double left_of_hom = 0, right_of_hom = 0;        // relative to p_homogeneous
};

struct BraggReport {
    PowerReport power;
    double directionality = 0;  // right / (left + right)
};

struct PurcellRow {
    double x = 0, y = 0;
    double p_total = 0;
    double ratio = 0;  // p_total / p_homogeneous
};

// Optional per-run diagnostics the CLI can dump.
struct FdtdTrace {
    std::vector<double> time;           // every few steps
    std::vector<double> flux_inner_box; // instantaneous Poynting flux
    std::vector<double> flux_outer_box;
    std::string flux_csv() const;
};

PowerReport run_dipole_sim(const FdtdConfig& config,
                           const LongitudinalStructure& structure,
                           FdtdTrace* trace = nullptr);

GuidedFractions guided_fraction_fdtd(const PowerReport& report);

BraggReport run_bragg_sim(const FdtdConfig& config,
                          const LongitudinalStructure& structure,
                          const BraggSpec& bragg, FdtdTrace* trace = nullptr);

std::vector<PurcellRow> purcell_scan(const FdtdConfig& config,
                                     const LongitudinalStructure& structure,
                                     const std::vector<std::pair<double, double>>& positions);

// Field snapshot (Ez at cell centers) as CSV, for plotting.
std::string fdtd_snapshot_csv(const FdtdConfig& config,
                              const LongitudinalStructure& structure,
                              const std::optional<BraggSpec>& bragg,
                              int at_step);

}  // namespace molwg
