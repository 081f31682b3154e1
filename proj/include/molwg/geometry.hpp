#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molwg/units.hpp"

// Materials, the strip/slot waveguide cross-section, emitter placement and
// rasterization of the relative permittivity onto a uniform 2D grid.
//
// Coordinate convention (cross-section plane): x is horizontal with the strip
// centered at x = 0; y is vertical with the core top surface at y = 0, so the
// core occupies -core_thickness < y < 0 and the substrate lies below.

namespace molwg {

struct Material {
    std::string name;
    double refractive_index = 1.0;  // at the working wavelength

    double permittivity() const { return refractive_index * refractive_index; }
};

// Built-in material table.
Material material_si3n4();       // n = 2.0
Material material_silica();      // n = 1.445
Material material_hexadecane();  // n = 1.434
Material material_mma();         // n = 1.42
Material material_vacuum();      // n = 1.0

// Lookup by name ("Si3N4", "silica", "n-hexadecane", "MMA", "vacuum");
// throws std::invalid_argument for unknown names.
Material material_by_name(const std::string& name);

struct WaveguideSpec {
    Material core;
    Material substrate;
    Material cladding;
    double core_thickness = 120 * nm;
    double core_width = 600 * nm;
    std::optional<double> slot_gap;  // slot variant: gap cut through the strip
    double wavelength = 785 * nm;

    // Throws std::invalid_argument when an invariant is violated
    // (non-positive lengths, core index not above substrate/cladding,
    // slot gap not smaller than the width).
    void validate() const;

    bool homogeneous() const;

    // The reference strip: 120 nm x 600 nm Si3N4 on silica under n-hexadecane,
    // lambda = 785 nm.
    static WaveguideSpec reference_strip();
    // Same strip with a 40 nm slot.
    static WaveguideSpec reference_slot();
};

struct EmitterPosition {
    double lateral_offset = 0.0;     // from strip center (m)
    double vertical_standoff = 0.0;  // above the core top surface (m)
    bool in_slot = false;            // place at the slot center instead
};

struct EmitterLocation {
    double x = 0.0;
    double y = 0.0;
    double eps_local = 1.0;  // relative permittivity at the emitter
};

// Uniform cell-centered grid over x in [-x_extent/2, x_extent/2] and
// y in [y_min(), y_min()+y_extent], placed so the margins above the core top
// and below the core bottom are equal.
struct Grid2D {
    double x_extent = 3.0 * um;
    double y_extent = 2.0 * um;
    double spacing = 10 * nm;
    double core_thickness = 120 * nm;  // used only to center the window vertically

    // nx is forced even so cell centers straddle x = 0 symmetrically and the
    // slot boundaries fall on cell edges for any window size; y_min is snapped
    // to a multiple of the spacing so the core surfaces stay on cell edges.
    int nx() const {
        int n = static_cast<int>(x_extent / spacing + 0.5);
        return n + (n & 1);
    }
    int ny() const { return static_cast<int>(y_extent / spacing + 0.5); }
    double x_min() const { return -0.5 * nx() * spacing; }
    double y_min() const {
        return -spacing * std::round(0.5 * (y_extent + core_thickness) / spacing);
    }
    double x_at(int i) const { return x_min() + (i + 0.5) * spacing; }
    double y_at(int j) const { return y_min() + (j + 0.5) * spacing; }

    void validate() const;  // spacing > 0, positive extents

    static Grid2D for_spec(const WaveguideSpec& spec, double spacing = 10 * nm,
                           double x_extent = 3.0 * um, double y_extent = 2.0 * um);
};

// Scalar field sampled at the cell centers of a Grid2D, row-major in j (y).
struct ScalarField2D {
    Grid2D grid;
    std::vector<double> values;  // size nx*ny, index = j*nx + i

    double& at(int i, int j) { return values[static_cast<size_t>(j) * grid.nx() + i]; }
    double at(int i, int j) const { return values[static_cast<size_t>(j) * grid.nx() + i]; }
};

// Material of the cross-section at a point. Points exactly on an interface
// resolve to the lower-index side.
double permittivity_at(const WaveguideSpec& spec, double x, double y);

// Rasterize by cell-center sampling. Throws std::invalid_argument if the grid
// does not contain the full core cross-section.
ScalarField2D permittivity_map(const WaveguideSpec& spec, const Grid2D& grid);

// Emitter coordinates in the cross-section plane plus the local permittivity.
// Throws std::invalid_argument for in_slot positions on a spec without a slot.
EmitterLocation locate_emitter(const WaveguideSpec& spec, const EmitterPosition& pos);

}  // namespace molwg
