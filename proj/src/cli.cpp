#include "molwg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "molwg/circuits.hpp"
#include "molwg/config.hpp"
#include "molwg/coupling.hpp"
#include "molwg/fdtd.hpp"
#include "molwg/mode_solver.hpp"
#include "molwg/nonlinear.hpp"

namespace molwg {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    bool emit_plot_data = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_flag("--emit-plot-data", args.emit_plot_data,
                  "also write plot-ready data files");
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// All results are computed before anything is written, so a failing run
// leaves no partial files.
void write_outputs(const CommonArgs& args, const RunManifest& manifest,
                   const std::map<std::string, std::string>& files) {
    fs::create_directories(args.out_dir);
    {
        std::ofstream out(fs::path(args.out_dir) / "manifest.json", std::ios::binary);
        out << manifest.to_json(true) << "\n";
    }
    for (const auto& [name, content] : files) {
        std::ofstream out(fs::path(args.out_dir) / name, std::ios::binary);
        out << content;
        if (!content.empty() && content.back() != '\n') out << "\n";
    }
}

json manifest_json(const RunManifest& m) { return json::parse(m.to_json(false)); }

json mode_summary_json(const GuidedMode& m) {
    return json{{"n_eff", m.n_eff},
                {"beta_rad_per_m", m.beta},
                {"wavelength_m", m.wavelength},
                {"polarization", m.polarization},
                {"residual", m.residual}};
}

struct SolvedGeometry {
    GuidedMode mode;
    ModeAreaResult area;
    GroupVelocityResult vg;
};

SolvedGeometry solve_geometry(const ToolConfig& cfg) {
    Grid2D grid = cfg.make_grid();
    auto modes = solve_modes(cfg.geometry, grid, 1);
    auto eps = permittivity_map(cfg.geometry, grid);
    auto r0 = locate_emitter(cfg.geometry, cfg.emitter.position);
    SolvedGeometry s{modes.front(), {}, {}};
    s.area = effective_mode_area(s.mode, eps, r0);
    s.vg = group_velocity(cfg.geometry, grid);
    return s;
}

int cmd_modes(const ToolConfig& cfg, const CommonArgs& args, const RunManifest& man) {
    auto s = solve_geometry(cfg);
    json j{{"manifest", manifest_json(man)},
           {"mode", mode_summary_json(s.mode)},
           {"a_eff_m2", s.area.a_eff},
           {"a_eff_over_lambda_sq", s.area.a_eff_over_lambda_sq},
           {"field_sq_at_r0", s.area.field_sq_at_r0},
           {"r0", {{"x_m", s.area.r0.x}, {"y_m", s.area.r0.y}, {"eps", s.area.r0.eps_local}}},
           {"group_velocity_m_per_s", s.vg.v_g}};
    std::map<std::string, std::string> files{{"mode_area.json", j.dump(2)},
                                             {"mode_field.csv", mode_field_csv(s.mode)}};
    write_outputs(args, man, files);
    return kExitOk;
}

int cmd_coupling(const ToolConfig& cfg, const CommonArgs& args, const RunManifest& man,
                 bool from_mode_solver) {
    const double lambda = cfg.geometry.wavelength;
    const double n = cfg.geometry.cladding.refractive_index;
    double a_eff = cfg.coupling.a_eff.value_or(0.42 * lambda * lambda);
    double v_g = cfg.coupling.group_velocity.value_or(c_light / n);
    json source = {{"a_eff", from_mode_solver ? "mode solver" : "config"},
                   {"v_g", from_mode_solver ? "mode solver" : "config"}};
    if (from_mode_solver) {
        auto s = solve_geometry(cfg);
        a_eff = s.area.a_eff;
        v_g = s.vg.v_g;
    }
    EmitterParams p = cfg.emitter.params;
    p.wavelength = lambda;
    auto rep = coupling_report(p, n, a_eff, v_g, cfg.coupling.total_rate_correction);
    json j{{"manifest", manifest_json(man)},
           {"inputs",
            {{"a_eff_m2", rep.a_eff},
             {"a_eff_over_lambda_sq", rep.a_eff / (lambda * lambda)},
             {"group_velocity_m_per_s", rep.group_velocity},
             {"matrix_index", rep.matrix_index},
             {"total_rate_correction", rep.total_rate_correction},
             {"source", source}}},
           {"ratio", rep.ratio},
           {"gamma_wg_rad_per_s", rep.gamma_wg},
           {"gamma_rad_rad_per_s", rep.gamma_rad},
           {"guided_fraction", rep.guided_fraction},
           {"mirror_enhanced_fraction", rep.mirror_enhanced_fraction},
           {"local_field_factor", rep.local_field_factor}};
    write_outputs(args, man, {{"coupling.json", j.dump(2)}});
    return kExitOk;
}

int cmd_phase_scan(const ToolConfig& cfg, const CommonArgs& args,
                   const RunManifest& man) {
    const PhaseScanSection& ps = cfg.phase_scan;
    const double g = ps.params.gamma;
    auto resp = scan(ps.params, -ps.delta_range * g, ps.delta_range * g, ps.samples);
    json peaks = json::object();
    for (int m : ps.params.photon_numbers) {
        auto pk = find_peak(resp, ps.params, "phase:" + std::to_string(m));
        peaks["phase_" + std::to_string(m)] = {{"delta_over_gamma", pk.delta / g},
                                               {"value_rad", pk.value}};
    }
    if (!resp.differential.empty()) {
        auto pk = find_peak(resp, ps.params, "differential");
        peaks["differential"] = {{"delta_over_gamma", pk.delta / g},
                                 {"value_rad", pk.value}};
        NonlinearParams at_peak = ps.params;
        peaks["extinction_at_differential_peak"] = extinction(1, pk.delta, at_peak);
    }
    json j{{"manifest", manifest_json(man)},
           {"gamma_rad_per_s", g},
           {"gamma_wg_fraction", ps.params.gamma_wg_fraction},
           {"eta", ps.params.eta},
           {"samples", ps.samples},
           {"peaks", peaks}};
    write_outputs(args, man,
                  {{"peaks.json", j.dump(2)},
                   {"phase_scan.csv", phase_response_csv(resp, g)}});
    return kExitOk;
}

json power_report_json(const PowerReport& p) {
    return json{{"p_total_W_per_m", p.p_total},
                {"p_total_outer_W_per_m", p.p_total_big},
                {"box_agreement", p.box_agreement},
                {"p_left_guided_W_per_m", p.p_left_guided},
                {"p_right_guided_W_per_m", p.p_right_guided},
                {"p_homogeneous_W_per_m", p.p_homogeneous},
                {"frequency_rad_per_s", p.frequency},
                {"steps", p.steps}};
}

int cmd_fdtd(const ToolConfig& cfg, const CommonArgs& args, const RunManifest& man) {
    LongitudinalStructure structure{cfg.geometry, cfg.fdtd_waveguide_present};
    FdtdTrace trace;
    auto rep = run_dipole_sim(cfg.fdtd, structure,
                              args.emit_plot_data ? &trace : nullptr);
    auto frac = guided_fraction_fdtd(rep);
    json j{{"manifest", manifest_json(man)},
           {"power", power_report_json(rep)},
           {"guided_fraction",
            {{"left", frac.left},
             {"right", frac.right},
             {"total", frac.total},
             {"left_of_homogeneous", frac.left_of_hom},
             {"right_of_homogeneous", frac.right_of_hom}}}};
    std::map<std::string, std::string> files{{"power.json", j.dump(2)}};
    if (args.emit_plot_data) files["flux.csv"] = trace.flux_csv();
    write_outputs(args, man, files);
    return kExitOk;
}

int cmd_bragg(const ToolConfig& cfg, const CommonArgs& args, const RunManifest& man) {
    LongitudinalStructure structure{cfg.geometry, true};
    const double design_lambda =
        cfg.geometry.wavelength * (1.0 + cfg.bragg.detune_fraction);
    BraggSpec bragg = BraggSpec::quarter_wave(cfg.geometry, cfg.bragg.periods,
                                              cfg.bragg.end_face_x, design_lambda);
    if (cfg.bragg.trench_width) bragg.trench_width = *cfg.bragg.trench_width;
    bragg.validate();
    // emitter inside the right-most trench, 20 nm from the end face,
    // at mid-core height
    FdtdConfig fc = cfg.fdtd;
    fc.source_x = bragg.end_face_x - 20 * nm;
    fc.source_y = -0.5 * cfg.geometry.core_thickness;
    FdtdTrace trace;
    auto rep = run_bragg_sim(fc, structure, bragg,
                             args.emit_plot_data ? &trace : nullptr);
    json j{{"manifest", manifest_json(man)},
           {"bragg",
            {{"periods", bragg.periods},
             {"high_length_m", bragg.high_length},
             {"low_length_m", bragg.low_length},
             {"trench_width_m", bragg.trench_width},
             {"end_face_x_m", bragg.end_face_x},
             {"design_wavelength_m", design_lambda}}},
           {"power", power_report_json(rep.power)},
           {"directionality", rep.directionality}};
    std::map<std::string, std::string> files{{"bragg.json", j.dump(2)}};
    if (args.emit_plot_data) files["flux.csv"] = trace.flux_csv();
    write_outputs(args, man, files);
    return kExitOk;
}

int cmd_hom(const ToolConfig& cfg, const CommonArgs& args, const RunManifest& man) {
    const double v = wavepacket_overlap_sq(cfg.hom.source1, cfg.hom.source2);
    const double pc = hom_coincidence(cfg.hom.source1, cfg.hom.source2);
    json j{{"manifest", manifest_json(man)},
           {"overlap_sq", v},
           {"coincidence_probability", pc},
           {"delta_rad_per_s",
            cfg.hom.source2.emitted_frequency() - cfg.hom.source1.emitted_frequency()}};
    write_outputs(args, man, {{"hom.json", j.dump(2)}});
    return kExitOk;
}

int cmd_mzgate(const ToolConfig& cfg, const CommonArgs& args, const RunManifest& man,
               bool pump_flag) {
    const MzGateSection& mz = cfg.mzgate;
    const bool pump = mz.pump || pump_flag;
    auto res = run_mz_gate(mz.probe, pump, mz.params, mz.delta);
    json j{{"manifest", manifest_json(man)},
           {"pump_present", res.pump_present},
           {"p_detector0", res.p_detector0},
           {"p_detector1", res.p_detector1},
           {"p_lost", res.p_lost},
           {"phi_applied_rad", res.phi_applied},
           {"delta_over_gamma", mz.delta / mz.params.gamma}};
    write_outputs(args, man, {{"mzgate.json", j.dump(2)}});
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"molecule-on-waveguide photonics toolkit"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd = nullptr;
        CommonArgs args;
    };
    std::map<std::string, Sub> subs;
    for (const char* name :
         {"modes", "coupling", "phase-scan", "fdtd", "bragg", "hom", "mzgate"}) {
        Sub& s = subs[name];
        s.cmd = app.add_subcommand(name);
        add_common(s.cmd, s.args);
    }
    subs["modes"].cmd->description("solve the cross-section mode and its area");
    subs["coupling"].cmd->description("emission rates and guided fractions");
    subs["phase-scan"].cmd->description("per-photon phase and extinction vs detuning");
    subs["fdtd"].cmd->description("2D dipole radiation simulation");
    subs["bragg"].cmd->description("2D simulation with a Bragg reflector");
    subs["hom"].cmd->description("two-source HOM coincidence");
    subs["mzgate"].cmd->description("nonlinear Mach-Zehnder gate");

    bool from_mode_solver = false;
    subs["coupling"].cmd->add_flag("--from-mode-solver", from_mode_solver,
                                   "take A_eff and v_g from the mode solver");
    double delta_range = 0;
    auto* delta_opt = subs["phase-scan"].cmd->add_option(
        "--delta-range", delta_range, "scan half-width in units of Gamma");
    std::string m_list;
    subs["phase-scan"].cmd->add_option("--m", m_list,
                                       "comma-separated photon numbers, e.g. 1,2,4");
    int periods = -1;
    subs["bragg"].cmd->add_option("--periods", periods, "number of mirror periods");
    bool pump_flag = false;
    subs["mzgate"].cmd->add_flag("--pump", pump_flag, "send the pump photon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const Sub& sub = subs.at(name);
    try {
        std::string config_bytes;
        ToolConfig cfg;
        if (!sub.args.config_path.empty()) {
            config_bytes = read_file_bytes(sub.args.config_path);
            cfg = parse_config(config_bytes);
        }
        if (*delta_opt) cfg.phase_scan.delta_range = delta_range;
        if (!m_list.empty()) {
            std::vector<int> ms;
            std::stringstream ss(m_list);
            std::string tok;
            while (std::getline(ss, tok, ',')) ms.push_back(std::stoi(tok));
            cfg.phase_scan.params.photon_numbers = ms;
            cfg.phase_scan.params.validate();
        }
        if (periods >= 0) cfg.bragg.periods = periods;
        RunManifest man =
            make_manifest(name, sub.args.config_path, config_bytes, sub.args.out_dir);

        if (name == "modes") return cmd_modes(cfg, sub.args, man);
        if (name == "coupling") return cmd_coupling(cfg, sub.args, man, from_mode_solver);
        if (name == "phase-scan") return cmd_phase_scan(cfg, sub.args, man);
        if (name == "fdtd") return cmd_fdtd(cfg, sub.args, man);
        if (name == "bragg") return cmd_bragg(cfg, sub.args, man);
        if (name == "hom") return cmd_hom(cfg, sub.args, man);
        if (name == "mzgate") return cmd_mzgate(cfg, sub.args, man, pump_flag);
        std::cerr << "unknown subcommand: " << name << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace molwg
