#include "molwg/config.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace molwg {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("unknown config key \"" + it.key() + "\" in " +
                                        where);
    }
}

double num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument(std::string("config key \"") + key +
                                    "\" must be a number");
    return v.get<double>();
}

void parse_geometry(const json& j, WaveguideSpec& g) {
    check_keys(j, "geometry",
               {"core", "substrate", "cladding", "core_thickness_nm", "core_width_nm",
                "slot_gap_nm", "wavelength_nm"});
    if (j.contains("core")) g.core = material_by_name(j.at("core").get<std::string>());
    if (j.contains("substrate"))
        g.substrate = material_by_name(j.at("substrate").get<std::string>());
    if (j.contains("cladding"))
        g.cladding = material_by_name(j.at("cladding").get<std::string>());
    g.core_thickness = num(j, "core_thickness_nm", g.core_thickness / nm) * nm;
    g.core_width = num(j, "core_width_nm", g.core_width / nm) * nm;
    g.wavelength = num(j, "wavelength_nm", g.wavelength / nm) * nm;
    if (j.contains("slot_gap_nm")) g.slot_gap = num(j, "slot_gap_nm", 0.0) * nm;
    g.validate();
}

void parse_grid(const json& j, GridSection& g) {
    check_keys(j, "grid", {"spacing_nm", "x_extent_um", "y_extent_um"});
    g.spacing = num(j, "spacing_nm", g.spacing / nm) * nm;
    g.x_extent = num(j, "x_extent_um", g.x_extent / um) * um;
    g.y_extent = num(j, "y_extent_um", g.y_extent / um) * um;
}

void parse_emitter(const json& j, EmitterSection& e) {
    check_keys(j, "emitter",
               {"standoff_nm", "lateral_offset_nm", "in_slot", "gamma_mhz", "eta",
                "orientation"});
    e.position.vertical_standoff =
        num(j, "standoff_nm", e.position.vertical_standoff / nm) * nm;
    e.position.lateral_offset =
        num(j, "lateral_offset_nm", e.position.lateral_offset / nm) * nm;
    if (j.contains("in_slot")) e.position.in_slot = j.at("in_slot").get<bool>();
    e.params.gamma_total = 2 * pi * 1e6 * num(j, "gamma_mhz", e.params.gamma_total / (2 * pi * 1e6));
    e.params.eta = num(j, "eta", e.params.eta);
    if (j.contains("orientation")) {
        auto v = j.at("orientation").get<std::vector<double>>();
        if (v.size() != 3)
            throw std::invalid_argument("emitter.orientation must have 3 components");
        e.params.dipole_orientation = {v[0], v[1], v[2]};
    }
    e.params.validate();
}

void parse_coupling(const json& j, CouplingSection& c) {
    check_keys(j, "coupling",
               {"a_eff_over_lambda_sq", "group_velocity_over_c", "total_rate_correction"});
    if (j.contains("a_eff_over_lambda_sq"))
        c.a_eff = num(j, "a_eff_over_lambda_sq", 0.0);  // scaled later by lambda^2
    if (j.contains("group_velocity_over_c"))
        c.group_velocity = num(j, "group_velocity_over_c", 0.0) * c_light;
    c.total_rate_correction = num(j, "total_rate_correction", c.total_rate_correction);
}

void parse_phase_scan(const json& j, PhaseScanSection& p) {
    check_keys(j, "phase_scan",
               {"gamma_mhz", "eta", "gamma_wg_fraction", "photon_numbers", "delta_range",
                "samples"});
    p.params.gamma = 2 * pi * 1e6 * num(j, "gamma_mhz", p.params.gamma / (2 * pi * 1e6));
    p.params.eta = num(j, "eta", p.params.eta);
    p.params.gamma_wg_fraction = num(j, "gamma_wg_fraction", p.params.gamma_wg_fraction);
    if (j.contains("photon_numbers"))
        p.params.photon_numbers = j.at("photon_numbers").get<std::vector<int>>();
    p.delta_range = num(j, "delta_range", p.delta_range);
    p.samples = static_cast<int>(num(j, "samples", p.samples));
    if (p.samples < 2) throw std::invalid_argument("phase_scan.samples must be >= 2");
    p.params.validate();
}

void parse_fdtd(const json& j, FdtdConfig& f, bool& waveguide_present) {
    check_keys(j, "fdtd",
               {"cell_nm", "courant", "window_x_um", "window_y_um", "pml_cells",
                "source_x_nm", "source_y_nm", "source_amplitude", "fractional_bandwidth",
                "decay_threshold",
                "max_steps", "box_half_um", "box_half_big_um", "guided_monitor_margin_um",
                "waveguide_present"});
    f.cell = num(j, "cell_nm", f.cell / nm) * nm;
    f.courant = num(j, "courant", f.courant);
    f.window_x = num(j, "window_x_um", f.window_x / um) * um;
    f.window_y = num(j, "window_y_um", f.window_y / um) * um;
    f.pml_cells = static_cast<int>(num(j, "pml_cells", f.pml_cells));
    f.source_x = num(j, "source_x_nm", f.source_x / nm) * nm;
    f.source_y = num(j, "source_y_nm", f.source_y / nm) * nm;
    f.source_amplitude = num(j, "source_amplitude", f.source_amplitude);
    f.fractional_bandwidth = num(j, "fractional_bandwidth", f.fractional_bandwidth);
    f.decay_threshold = num(j, "decay_threshold", f.decay_threshold);
    f.max_steps = static_cast<int>(num(j, "max_steps", f.max_steps));
    f.box_half = num(j, "box_half_um", f.box_half / um) * um;
    f.box_half_big = num(j, "box_half_big_um", f.box_half_big / um) * um;
    f.guided_monitor_margin =
        num(j, "guided_monitor_margin_um", f.guided_monitor_margin / um) * um;
    if (j.contains("waveguide_present"))
        waveguide_present = j.at("waveguide_present").get<bool>();
    f.validate();
}

void parse_bragg(const json& j, BraggSection& b) {
    check_keys(j, "bragg",
               {"periods", "end_face_x_um", "trench_width_nm", "detune_fraction"});
    b.periods = static_cast<int>(num(j, "periods", b.periods));
    b.end_face_x = num(j, "end_face_x_um", b.end_face_x / um) * um;
    if (j.contains("trench_width_nm"))
        b.trench_width = num(j, "trench_width_nm", 0.0) * nm;
    b.detune_fraction = num(j, "detune_fraction", b.detune_fraction);
    if (b.periods < 0) throw std::invalid_argument("bragg.periods must be >= 0");
}

void parse_source(const json& j, const std::string& where, SourceSpec& s) {
    check_keys(j, where,
               {"wavelength_nm", "linewidth_mhz", "emission_probability",
                "stark_offset_mhz"});
    if (j.contains("wavelength_nm"))
        s.center_frequency = omega_from_wavelength(num(j, "wavelength_nm", 785.0) * nm);
    s.linewidth = 2 * pi * 1e6 * num(j, "linewidth_mhz", s.linewidth / (2 * pi * 1e6));
    s.emission_probability = num(j, "emission_probability", s.emission_probability);
    s.stark_offset = 2 * pi * 1e6 * num(j, "stark_offset_mhz", s.stark_offset / (2 * pi * 1e6));
}

void parse_hom(const json& j, HomSection& h) {
    check_keys(j, "hom", {"source1", "source2"});
    if (j.contains("source1")) parse_source(j.at("source1"), "hom.source1", h.source1);
    if (j.contains("source2")) parse_source(j.at("source2"), "hom.source2", h.source2);
}

void parse_mzgate(const json& j, MzGateSection& m) {
    check_keys(j, "mzgate",
               {"probe", "pump", "gamma_wg_fraction", "eta", "delta_over_gamma"});
    if (j.contains("probe")) parse_source(j.at("probe"), "mzgate.probe", m.probe);
    if (j.contains("pump")) m.pump = j.at("pump").get<bool>();
    m.params.gamma = m.probe.linewidth;
    m.params.gamma_wg_fraction =
        num(j, "gamma_wg_fraction", m.params.gamma_wg_fraction);
    m.params.eta = num(j, "eta", m.params.eta);
    m.delta = num(j, "delta_over_gamma", m.delta / m.params.gamma) * m.params.gamma;
    m.params.validate();
}

}  // namespace

Grid2D ToolConfig::make_grid() const {
    Grid2D g;
    g.spacing = grid.spacing;
    g.x_extent = grid.x_extent;
    g.y_extent = grid.y_extent;
    g.core_thickness = geometry.core_thickness;
    g.validate();
    return g;
}

ToolConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
    check_keys(j, "config root",
               {"geometry", "grid", "emitter", "coupling", "phase_scan", "fdtd", "bragg",
                "hom", "mzgate"});
    ToolConfig c;
    try {
        if (j.contains("geometry")) parse_geometry(j.at("geometry"), c.geometry);
        if (j.contains("grid")) parse_grid(j.at("grid"), c.grid);
        if (j.contains("emitter")) parse_emitter(j.at("emitter"), c.emitter);
        if (j.contains("coupling")) parse_coupling(j.at("coupling"), c.coupling);
        if (j.contains("phase_scan")) parse_phase_scan(j.at("phase_scan"), c.phase_scan);
        if (j.contains("fdtd"))
            parse_fdtd(j.at("fdtd"), c.fdtd, c.fdtd_waveguide_present);
        if (j.contains("bragg")) parse_bragg(j.at("bragg"), c.bragg);
        if (j.contains("hom")) parse_hom(j.at("hom"), c.hom);
        if (j.contains("mzgate")) parse_mzgate(j.at("mzgate"), c.mzgate);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config type error: ") + e.what());
    }
    // coupling.a_eff was parsed in lambda^2 units
    if (c.coupling.a_eff)
        *c.coupling.a_eff *= c.geometry.wavelength * c.geometry.wavelength;
    return c;
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string RunManifest::to_json(bool with_timestamp) const {
    json j{{"subcommand", subcommand},
           {"config_path", config_path},
           {"tool_version", tool_version},
           {"config_digest", config_digest}};
    // run-specific metadata lives only in manifest.json so result files are
    // byte-identical across reruns
    if (with_timestamp) {
        j["out_dir"] = out_dir;
        j["timestamp"] = timestamp;
    }
    return j.dump(2);
}

RunManifest make_manifest(const std::string& subcommand, const std::string& config_path,
                          const std::string& config_bytes, const std::string& out_dir) {
    RunManifest m;
    m.subcommand = subcommand;
    m.config_path = config_path.empty() ? "(defaults)" : config_path;
    m.out_dir = out_dir;
    m.tool_version = "0.1.0";
    m.config_digest = config_digest(config_bytes);
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    m.timestamp = buf;
    return m;
}

}  // namespace molwg
