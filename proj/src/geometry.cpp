#include "molwg/geometry.hpp"

#include <cmath>

namespace molwg {

Material material_si3n4() { return {"Si3N4", 2.0}; }
Material material_silica() { return {"silica", 1.445}; }
Material material_hexadecane() { return {"n-hexadecane", 1.434}; }
Material material_mma() { return {"MMA", 1.42}; }
Material material_vacuum() { return {"vacuum", 1.0}; }

Material material_by_name(const std::string& name) {
    if (name == "Si3N4" || name == "si3n4") return material_si3n4();
    if (name == "silica" || name == "SiO2") return material_silica();
    if (name == "n-hexadecane" || name == "hexadecane") return material_hexadecane();
    if (name == "MMA" || name == "mma") return material_mma();
    if (name == "vacuum") return material_vacuum();
    throw std::invalid_argument("unknown material: " + name);
}

void WaveguideSpec::validate() const {
    if (core_thickness <= 0 || core_width <= 0 || wavelength <= 0)
        throw std::invalid_argument("waveguide dimensions and wavelength must be positive");
    if (core.refractive_index < 1 || substrate.refractive_index < 1 ||
        cladding.refractive_index < 1)
        throw std::invalid_argument("refractive indices must be >= 1");
    if (!homogeneous()) {
        if (core.refractive_index <= substrate.refractive_index ||
            core.refractive_index <= cladding.refractive_index)
            throw std::invalid_argument("core index must exceed substrate and cladding");
    }
    if (slot_gap) {
        if (*slot_gap <= 0) throw std::invalid_argument("slot gap must be positive");
        if (*slot_gap >= core_width)
            throw std::invalid_argument("slot gap must be smaller than the core width");
    }
}

bool WaveguideSpec::homogeneous() const {
    return core.refractive_index == substrate.refractive_index &&
           core.refractive_index == cladding.refractive_index;
}

WaveguideSpec WaveguideSpec::reference_strip() {
    WaveguideSpec s;
    s.core = material_si3n4();
    s.substrate = material_silica();
    s.cladding = material_hexadecane();
    s.core_thickness = 120 * nm;
    s.core_width = 600 * nm;
    s.wavelength = 785 * nm;
    return s;
}

WaveguideSpec WaveguideSpec::reference_slot() {
    WaveguideSpec s = reference_strip();
    s.slot_gap = 40 * nm;
    return s;
}

void Grid2D::validate() const {
    if (spacing <= 0) throw std::invalid_argument("grid spacing must be positive");
    if (x_extent < spacing || y_extent < spacing)
        throw std::invalid_argument("grid extents must be positive");
}

Grid2D Grid2D::for_spec(const WaveguideSpec& spec, double spacing,
                        double x_extent, double y_extent) {
    Grid2D g;
    g.spacing = spacing;
    g.x_extent = x_extent;
    g.y_extent = y_extent;
    g.core_thickness = spec.core_thickness;
    g.validate();
    return g;
}

double permittivity_at(const WaveguideSpec& spec, double x, double y) {
    const double t = spec.core_thickness;
    const double hw = 0.5 * spec.core_width;
    if (y <= -t) return spec.substrate.permittivity();
    if (y >= 0.0) return spec.cladding.permittivity();
    // inside the core layer
    if (std::abs(x) >= hw) return spec.cladding.permittivity();
    if (spec.slot_gap && std::abs(x) <= 0.5 * *spec.slot_gap)
        return spec.cladding.permittivity();
    return spec.core.permittivity();
}

ScalarField2D permittivity_map(const WaveguideSpec& spec, const Grid2D& grid) {
    spec.validate();
    grid.validate();
    const double hw = 0.5 * spec.core_width;
    if (0.5 * grid.x_extent < hw)
        throw std::invalid_argument("grid too small to contain core (x extent)");
    if (grid.y_min() > -spec.core_thickness || grid.y_min() + grid.y_extent < 0.0)
        throw std::invalid_argument("grid too small to contain core (y extent)");

    ScalarField2D f;
    f.grid = grid;
    f.values.assign(static_cast<size_t>(grid.nx()) * grid.ny(), 0.0);
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i)
            f.at(i, j) = permittivity_at(spec, grid.x_at(i), grid.y_at(j));
    return f;
}

EmitterLocation locate_emitter(const WaveguideSpec& spec, const EmitterPosition& pos) {
    spec.validate();
    EmitterLocation loc;
    if (pos.in_slot) {
        if (!spec.slot_gap)
            throw std::invalid_argument("emitter placed in slot but spec has no slot gap");
        loc.x = pos.lateral_offset;
        loc.y = -0.5 * spec.core_thickness;  // mid-height of the core layer
        if (std::abs(loc.x) > 0.5 * *spec.slot_gap)
            throw std::invalid_argument("in-slot emitter lies outside the gap");
        loc.eps_local = spec.cladding.permittivity();
        return loc;
    }
    if (pos.vertical_standoff < 0)
        throw std::invalid_argument("vertical standoff must be >= 0");
    loc.x = pos.lateral_offset;
    loc.y = pos.vertical_standoff;
    // standoff 0 sits exactly on the interface, resolved to the cladding side
    loc.eps_local = spec.cladding.permittivity();
    return loc;
}

}  // namespace molwg
