#pragma once

#include <optional>
#include <string>
#include <vector>

#include "molwg/circuits.hpp"
#include "molwg/coupling.hpp"
#include "molwg/fdtd.hpp"
#include "molwg/geometry.hpp"
#include "molwg/nonlinear.hpp"

// JSON config files for the CLI: one format across subcommands with
// per-subcommand sections. Unknown keys anywhere are hard errors. All
// defaults reproduce the headline strip/slot setup, so an empty config
// ({}) is valid for every subcommand.

namespace molwg {

struct GridSection {
    double spacing = 10 * nm;
    double x_extent = 3.0 * um;
    double y_extent = 2.0 * um;
};

struct EmitterSection {
    EmitterPosition position{0.0, 20 * nm, false};  // 20 nm above the strip center
    EmitterParams params;
};

struct CouplingSection {
    // defaults are the headline inputs: A_eff = 0.42 lambda^2, v_g = c/n
    std::optional<double> a_eff;             // m^2; unset -> 0.42 lambda^2
    std::optional<double> group_velocity;    // m/s; unset -> c/n
    double total_rate_correction = 1.0;
};

struct PhaseScanSection {
    NonlinearParams params;
    double delta_range = 4.0;     // scan over [-range, range] * Gamma
    int samples = 801;
};

struct BraggSection {
    int periods = 8;
    double end_face_x = 0.6 * um;
    std::optional<double> trench_width;  // unset -> quarter-wave low block
    double detune_fraction = 0.0;        // size the stack at (1+f) * lambda
};

struct HomSection {
    SourceSpec source1;
    SourceSpec source2;
};

struct MzGateSection {
    SourceSpec probe;
    bool pump = false;
    NonlinearParams params;
    double delta = 0.0;           // rad/s, detuning at the molecule
};

struct ToolConfig {
    WaveguideSpec geometry = WaveguideSpec::reference_strip();
    GridSection grid;
    EmitterSection emitter;
    CouplingSection coupling;
    PhaseScanSection phase_scan;
    FdtdConfig fdtd;
    bool fdtd_waveguide_present = true;
    BraggSection bragg;
    HomSection hom;
    MzGateSection mzgate;

    Grid2D make_grid() const;
};

// Parse a config file. Throws std::invalid_argument on unreadable files,
// JSON syntax errors, unknown keys or invalid values.
ToolConfig load_config(const std::string& path);
ToolConfig parse_config(const std::string& json_text);

// FNV-1a 64-bit digest of the raw config bytes, in hex.
std::string config_digest(const std::string& bytes);

struct RunManifest {
    std::string subcommand;
    std::string config_path;     // "(defaults)" when no file was given
    std::string out_dir;
    std::string tool_version;
    std::string config_digest;
    std::string timestamp;       // RFC 3339 UTC; excluded from result files

    // with_timestamp=false gives the deterministic form embedded in results
    std::string to_json(bool with_timestamp) const;
};

RunManifest make_manifest(const std::string& subcommand, const std::string& config_path,
                          const std::string& config_bytes, const std::string& out_dir);

}  // namespace molwg
