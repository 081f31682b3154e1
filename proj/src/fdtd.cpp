#include "molwg/fdtd.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace molwg {

void FdtdConfig::validate() const {
    if (cell <= 0) throw std::invalid_argument("cell size must be positive");
    if (courant <= 0 || courant > 1.0 / std::sqrt(2.0) + 1e-12)
        throw std::invalid_argument("Courant fraction must lie in (0, 1/sqrt(2)]");
    if (pml_cells < 8) throw std::invalid_argument("PML must be at least 8 cells");
    if (window_x <= 0 || window_y <= 0)
        throw std::invalid_argument("window extents must be positive");
    if (wavelength <= 0) throw std::invalid_argument("wavelength must be positive");
    if (fractional_bandwidth <= 0 || fractional_bandwidth >= 1)
        throw std::invalid_argument("fractional bandwidth must lie in (0,1)");
    if (decay_threshold <= 0 || decay_threshold >= 1)
        throw std::invalid_argument("decay threshold must lie in (0,1)");
    const double pml_x = pml_cells * cell;
    if (box_half_big + pml_x >= 0.5 * window_x ||
        box_half_big + pml_x >= 0.5 * window_y)
        throw std::invalid_argument("flux box extends into the PML");
    if (guided_monitor_margin <= 0 ||
        pml_x + guided_monitor_margin >= 0.5 * window_x)
        throw std::invalid_argument("guided monitor lies in the PML");
    if (box_half >= box_half_big)
        throw std::invalid_argument("inner box must be smaller than outer box");
}

SlabStack LongitudinalStructure::slab() const {
    SlabStack s;
    s.n_substrate = spec.substrate.refractive_index;
    s.n_core = spec.core.refractive_index;
    s.n_cladding = spec.cladding.refractive_index;
    s.core_thickness = spec.core_thickness;
    return s;
}

LongitudinalStructure LongitudinalStructure::homogeneous(const WaveguideSpec& spec) {
    LongitudinalStructure s;
    s.spec = spec;
    s.waveguide_present = false;
    return s;
}

BraggSpec BraggSpec::quarter_wave(const WaveguideSpec& spec, int periods,
                                  double end_face_x, double wavelength) {
    BraggSpec b;
    b.periods = periods;
    SlabStack stack;
    stack.n_substrate = spec.substrate.refractive_index;
    stack.n_core = spec.core.refractive_index;
    stack.n_cladding = spec.cladding.refractive_index;
    stack.core_thickness = spec.core_thickness;
    const double n_high = slab_te0_neff(stack, wavelength);
    const double n_low = spec.cladding.refractive_index;
    b.high_length = wavelength / (4.0 * n_high);
    b.low_length = wavelength / (4.0 * n_low);
    b.trench_width = b.low_length;
    b.end_face_x = end_face_x;
    return b;
}

void BraggSpec::validate() const {
    if (periods < 0) throw std::invalid_argument("period count must be >= 0");
    if (periods > 0 && (high_length <= 0 || low_length <= 0 || trench_width <= 0))
        throw std::invalid_argument("Bragg block lengths must be positive");
}

bool BraggSpec::in_trench(double x) const {
    if (periods <= 0) return false;
    if (x > end_face_x - trench_width && x <= end_face_x) return true;  // emitter trench
    for (int m = 1; m <= periods; ++m) {
        const double right = end_face_x - trench_width - m * high_length -
                             (m - 1) * low_length;
        if (x > right - low_length && x <= right) return true;
    }
    return false;
}

namespace {

double eps_longitudinal(const LongitudinalStructure& s,
                        const BraggSpec* bragg, double x, double y) {
    if (!s.waveguide_present) return s.spec.cladding.permittivity();
    const double t = s.spec.core_thickness;
    if (y <= -t) return s.spec.substrate.permittivity();
    if (y >= 0.0) return s.spec.cladding.permittivity();
    if (bragg && bragg->in_trench(x)) return s.spec.cladding.permittivity();
    return s.spec.core.permittivity();
}

using Cx = std::complex<double>;

// DFT accumulators for one vertical or horizontal line of Ez nodes.
struct LineMonitor {
    bool vertical = true;
    int fixed = 0;              // i for vertical, j for horizontal
    int lo = 0, hi = 0;         // inclusive node range along the line
    std::vector<Cx> ez_hat;     // per node
    std::vector<Cx> ht_hat;     // tangential H interpolated to Ez nodes
};

class Sim {
public:
    Sim(const FdtdConfig& cfg, const LongitudinalStructure& structure,
        const BraggSpec* bragg)
        : cfg_(cfg), structure_(structure), bragg_(bragg) {
        cfg_.validate();
        structure_.spec.validate();
        grid_.x_extent = cfg_.window_x;
        grid_.y_extent = cfg_.window_y;
        grid_.spacing = cfg_.cell;
        grid_.core_thickness = structure_.spec.core_thickness;
        nx_ = grid_.nx();
        ny_ = grid_.ny();
        h_ = cfg_.cell;
        dt_ = cfg_.courant * h_ / c_light;
        omega_ = cfg_.omega0();

        eps_.assign(static_cast<size_t>(nx_) * ny_, 1.0);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                eps_[id(i, j)] =
                    eps_longitudinal(structure_, bragg_, grid_.x_at(i), grid_.y_at(j));

        ez_.assign(eps_.size(), 0.0);
        dz_.assign(eps_.size(), 0.0);
        hx_.assign(eps_.size(), 0.0);  // (i, j+1/2), row j up to ny-2 used
        bx_.assign(eps_.size(), 0.0);
        hy_.assign(eps_.size(), 0.0);  // (i+1/2, j), col i up to nx-2 used
        by_.assign(eps_.size(), 0.0);

        // quartic-graded PML conductivity, reflection target 1e-6
        const double d = cfg_.pml_cells * h_;
        const double smax = 5.0 * eps0 * c_light * std::log(1e6) / (2.0 * d);
        auto sigma_profile = [&](double pos_cells, int n_cells) {
            const double left = cfg_.pml_cells - pos_cells;
            const double right = pos_cells - (n_cells - cfg_.pml_cells);
            const double depth = std::max(left, right) / cfg_.pml_cells;
            if (depth <= 0) return 0.0;
            return smax * std::pow(std::min(depth, 1.0), 4);
        };
        sx_int_.resize(nx_);
        sx_half_.resize(nx_);
        for (int i = 0; i < nx_; ++i) {
            sx_int_[i] = sigma_profile(i + 0.5, nx_);
            sx_half_[i] = sigma_profile(i + 1.0, nx_);
        }
        sy_int_.resize(ny_);
        sy_half_.resize(ny_);
        for (int j = 0; j < ny_; ++j) {
            sy_int_[j] = sigma_profile(j + 0.5, ny_);
            sy_half_[j] = sigma_profile(j + 1.0, ny_);
        }

        src_i_ = node_x(cfg_.source_x);
        src_j_ = node_y(cfg_.source_y);
        tau_ = 2.0 / (cfg_.fractional_bandwidth * omega_);
        t0_ = 4.5 * tau_;
        t_off_ = t0_ + 4.5 * tau_;
    }

    int node_x(double x) const {
        const int i = static_cast<int>(std::floor((x - grid_.x_min()) / h_));
        if (i < 0 || i >= nx_) throw std::invalid_argument("position outside window");
        return i;
    }
    int node_y(double y) const {
        const int j = static_cast<int>(std::floor((y - grid_.y_min()) / h_));
        if (j < 0 || j >= ny_) throw std::invalid_argument("position outside window");
        return j;
    }

    void add_box(double half, LineMonitor out[4]) {
        const int il = node_x(cfg_.source_x - half), ir = node_x(cfg_.source_x + half);
        const int jb = node_y(cfg_.source_y - half), jt = node_y(cfg_.source_y + half);
        out[0] = {true, ir, jb, jt, {}, {}};   // right side
        out[1] = {true, il, jb, jt, {}, {}};   // left side
        out[2] = {false, jt, il, ir, {}, {}};  // top
        out[3] = {false, jb, il, ir, {}, {}};  // bottom
        for (int k = 0; k < 4; ++k) {
            const size_t count = out[k].hi - out[k].lo + 1;
            out[k].ez_hat.assign(count, 0.0);
            out[k].ht_hat.assign(count, 0.0);
        }
    }

    void setup_monitors(bool guided) {
        add_box(cfg_.box_half, inner_);
        add_box(cfg_.box_half_big, outer_);
        if (guided) {
            const double xr =
                0.5 * cfg_.window_x - cfg_.pml_cells * h_ - cfg_.guided_monitor_margin;
            const int jb = cfg_.pml_cells + 1, jt = ny_ - cfg_.pml_cells - 2;
            right_ = {true, node_x(xr), jb, jt, {}, {}};
            left_ = {true, node_x(-xr), jb, jt, {}, {}};
            for (LineMonitor* m : {&right_, &left_}) {
                const size_t count = m->hi - m->lo + 1;
                m->ez_hat.assign(count, 0.0);
                m->ht_hat.assign(count, 0.0);
            }
            has_guided_ = true;
        }
    }

    void accumulate(LineMonitor& m, double t_e, double t_h) {
        const Cx pe = std::exp(Cx(0.0, omega_ * t_e)) * dt_;
        const Cx ph = std::exp(Cx(0.0, omega_ * t_h)) * dt_;
        if (m.vertical) {
            const int i = m.fixed;
            for (int j = m.lo; j <= m.hi; ++j) {
                const double hy_c = 0.5 * (hy_[id(i, j)] + hy_[id(i - 1, j)]);
                m.ez_hat[j - m.lo] += pe * ez_[id(i, j)];
                m.ht_hat[j - m.lo] += ph * hy_c;
            }
        } else {
            const int j = m.fixed;
            for (int i = m.lo; i <= m.hi; ++i) {
                const double hx_c = 0.5 * (hx_[id(i, j)] + hx_[id(i, j - 1)]);
                m.ez_hat[i - m.lo] += pe * ez_[id(i, j)];
                m.ht_hat[i - m.lo] += ph * hx_c;
            }
        }
    }

    // spectral Poynting flux through the line, positive toward +x (vertical)
    // or +y (horizontal)
    double spectral_flux(const LineMonitor& m) const {
        double p = 0;
        for (size_t k = 0; k < m.ez_hat.size(); ++k) {
            const Cx s = m.ez_hat[k] * std::conj(m.ht_hat[k]);
            p += m.vertical ? -0.5 * s.real() : 0.5 * s.real();
        }
        return p * h_;
    }

    double box_outward(const LineMonitor box[4]) const {
        return spectral_flux(box[0]) - spectral_flux(box[1]) + spectral_flux(box[2]) -
               spectral_flux(box[3]);
    }

    double instantaneous_box_flux(const LineMonitor box[4]) const {
        double p = 0;
        for (int k = 0; k < 4; ++k) {
            const LineMonitor& m = box[k];
            double f = 0;
            if (m.vertical) {
                for (int j = m.lo; j <= m.hi; ++j)
                    f += -ez_[id(m.fixed, j)] * 0.5 *
                         (hy_[id(m.fixed, j)] + hy_[id(m.fixed - 1, j)]);
            } else {
                for (int i = m.lo; i <= m.hi; ++i)
                    f += ez_[id(i, m.fixed)] * 0.5 *
                         (hx_[id(i, m.fixed)] + hx_[id(i, m.fixed - 1)]);
            }
            const double sign = (k == 0 || k == 2) ? 1.0 : -1.0;
            p += sign * f * h_;
        }
        return p;
    }

    double field_energy() const {
        double e = 0;
        for (int j = cfg_.pml_cells; j < ny_ - cfg_.pml_cells; ++j)
            for (int i = cfg_.pml_cells; i < nx_ - cfg_.pml_cells; ++i) {
                const size_t k = id(i, j);
                e += 0.5 * (eps0 * eps_[k] * ez_[k] * ez_[k] +
                            mu0 * (hx_[k] * hx_[k] + hy_[k] * hy_[k]));
            }
        return e * h_ * h_;
    }

    void step(int n) {
        const double t = n * dt_;
        // H update: Ez^n -> H^{n+1/2}
        for (int j = 0; j < ny_ - 1; ++j) {
            const double ay = sy_half_[j] * dt_ / (2 * eps0);
            const double c1 = (1 - ay) / (1 + ay), c2 = dt_ / (1 + ay);
            for (int i = 0; i < nx_; ++i) {
                const double ax = sx_int_[i] * dt_ / (2 * eps0);
                const size_t k = id(i, j);
                const double b_old = bx_[k];
                bx_[k] = c1 * b_old - c2 * (ez_[id(i, j + 1)] - ez_[k]) / h_;
                hx_[k] += ((1 + ax) * bx_[k] - (1 - ax) * b_old) / mu0;
            }
        }
        for (int j = 0; j < ny_; ++j) {
            const double ay = sy_int_[j] * dt_ / (2 * eps0);
            for (int i = 0; i < nx_ - 1; ++i) {
                const double ax = sx_half_[i] * dt_ / (2 * eps0);
                const double c1 = (1 - ax) / (1 + ax), c2 = dt_ / (1 + ax);
                const size_t k = id(i, j);
                const double b_old = by_[k];
                by_[k] = c1 * b_old + c2 * (ez_[id(i + 1, j)] - ez_[k]) / h_;
                hy_[k] += ((1 + ay) * by_[k] - (1 - ay) * b_old) / mu0;
            }
        }
        // Ez update with the source current at t + dt/2
        const double ts = t + 0.5 * dt_;
        const double arg = (ts - t0_) / tau_;
        const double j_src =
            ts < t_off_ ? cfg_.source_amplitude * std::sin(omega_ * (ts - t0_)) *
                              std::exp(-0.5 * arg * arg)
                        : 0.0;
        for (int j = 1; j < ny_ - 1; ++j) {
            const double ay = sy_int_[j] * dt_ / (2 * eps0);
            const double c1y = (1 - ay) / (1 + ay);
            for (int i = 1; i < nx_ - 1; ++i) {
                const double ax = sx_int_[i] * dt_ / (2 * eps0);
                const double c1 = (1 - ax) / (1 + ax), c2 = dt_ / (1 + ax);
                const size_t k = id(i, j);
                double curl = (hy_[k] - hy_[id(i - 1, j)]) / h_ -
                              (hx_[k] - hx_[id(i, j - 1)]) / h_;
                if (i == src_i_ && j == src_j_) curl -= j_src;
                const double d_old = dz_[k];
                dz_[k] = c1 * d_old + c2 * curl;
                ez_[k] = c1y * ez_[k] + (dz_[k] - d_old) / (eps0 * eps_[k] * (1 + ay));
            }
        }
        // DFT accumulation; Ez at (n+1)dt, H at (n+1/2)dt
        const double te = (n + 1) * dt_, th = (n + 0.5) * dt_;
        for (int k = 0; k < 4; ++k) {
            accumulate(inner_[k], te, th);
            accumulate(outer_[k], te, th);
        }
        if (has_guided_) {
            accumulate(right_, te, th);
            accumulate(left_, te, th);
        }
    }

    PowerReport run(FdtdTrace* trace) {
        setup_monitors(structure_.waveguide_present);
        double peak_energy = 0;
        double prev_energy = 0;
        int growth_strikes = 0;
        int n = 0;
        for (; n < cfg_.max_steps; ++n) {
            step(n);
            if (trace && n % 10 == 0) {
                trace->time.push_back((n + 1) * dt_);
                trace->flux_inner_box.push_back(instantaneous_box_flux(inner_));
                trace->flux_outer_box.push_back(instantaneous_box_flux(outer_));
            }
            if (n % 100 == 0) {
                const double e = field_energy();
                if (!std::isfinite(e))
                    throw std::runtime_error("FDTD instability: non-finite field energy");
                const double t = (n + 1) * dt_;
                if (t > t_off_) {
                    peak_energy = std::max(peak_energy, e);
                    if (e > prev_energy * 1.001 && prev_energy > 0) {
                        if (++growth_strikes >= 3)
                            throw std::runtime_error(
                                "FDTD instability: field energy grows after source off");
                    } else {
                        growth_strikes = 0;
                    }
                    if (peak_energy > 0 && e < cfg_.decay_threshold * peak_energy) {
                        ++n;
                        break;
                    }
                    prev_energy = e;
                }
            }
        }

        PowerReport r;
        r.frequency = omega_;
        r.steps = n;
        r.p_total = box_outward(inner_);
        r.p_total_big = box_outward(outer_);
        r.box_agreement =
            r.p_total != 0 ? std::abs(r.p_total - r.p_total_big) / std::abs(r.p_total)
                           : 0.0;
        if (has_guided_) {
            const SlabStack stack = structure_.slab();
            const double beta =
                slab_te0_neff(stack, cfg_.wavelength) * 2 * pi / cfg_.wavelength;
            r.p_right_guided = guided_power(right_, stack, beta, /*forward=*/true);
            r.p_left_guided = guided_power(left_, stack, beta, /*forward=*/false);
        }
        return r;
    }

    // overlap projection of the monitor DFT onto the slab mode
    double guided_power(const LineMonitor& m, const SlabStack& stack, double beta,
                        bool forward) const {
        const double s = (forward ? -1.0 : 1.0) * beta / (omega_ * mu0);
        // slab profile at the monitor's node heights
        const SlabMode mode = solve_slab_mode_1d(
            stack, cfg_.wavelength, grid_.y_at(m.lo), grid_.y_at(m.hi), h_);
        Cx num_e = 0, num_h = 0;
        double f2 = 0;
        for (size_t k = 0; k < m.ez_hat.size() && k < mode.field.size(); ++k) {
            const double f = mode.field[k];
            num_e += m.ez_hat[k] * f;
            num_h += m.ht_hat[k] * f;
            f2 += f * f;
        }
        const Cx a = (s * num_e + num_h) / (2.0 * s * f2);
        const double p_mode = 0.5 * std::abs(s) * f2 * h_;
        return std::norm(a) * p_mode;
    }

    std::string snapshot_csv(int at_step) {
        setup_monitors(structure_.waveguide_present);
        for (int n = 0; n < at_step; ++n) step(n);
        std::ostringstream os;
        os.precision(10);
        os << "x[m],y[m],ez\n";
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                os << grid_.x_at(i) << "," << grid_.y_at(j) << "," << ez_[id(i, j)]
                   << "\n";
        return os.str();
    }

private:
    size_t id(int i, int j) const { return static_cast<size_t>(j) * nx_ + i; }

    FdtdConfig cfg_;
    LongitudinalStructure structure_;
    const BraggSpec* bragg_;
    Grid2D grid_;
    int nx_ = 0, ny_ = 0;
    double h_ = 0, dt_ = 0, omega_ = 0;
    double tau_ = 0, t0_ = 0, t_off_ = 0;
    int src_i_ = 0, src_j_ = 0;
    std::vector<double> eps_, ez_, dz_, hx_, bx_, hy_, by_;
    std::vector<double> sx_int_, sx_half_, sy_int_, sy_half_;
    LineMonitor inner_[4], outer_[4], right_, left_;
    bool has_guided_ = false;
};

}  // namespace

std::string FdtdTrace::flux_csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "t[s],flux_inner_box,flux_outer_box\n";
    for (size_t k = 0; k < time.size(); ++k)
        os << time[k] << "," << flux_inner_box[k] << "," << flux_outer_box[k] << "\n";
    return os.str();
}

PowerReport run_dipole_sim(const FdtdConfig& config,
                           const LongitudinalStructure& structure,
                           FdtdTrace* trace) {
    Sim sim(config, structure, nullptr);
    PowerReport r = sim.run(trace);
    if (structure.waveguide_present) {
        Sim hom(config, LongitudinalStructure::homogeneous(structure.spec), nullptr);
        r.p_homogeneous = hom.run(nullptr).p_total;
    } else {
        r.p_homogeneous = r.p_total;
    }
    return r;
}

GuidedFractions guided_fraction_fdtd(const PowerReport& report) {
    if (report.p_total <= 0)
        throw std::invalid_argument("report lacks a positive total power");
    GuidedFractions f;
    f.left = report.p_left_guided / report.p_total;
    f.right = report.p_right_guided / report.p_total;
    f.total = f.left + f.right;
    if (report.p_homogeneous > 0) {
        f.left_of_hom = report.p_left_guided / report.p_homogeneous;
        f.right_of_hom = report.p_right_guided / report.p_homogeneous;
    }
    return f;
}

BraggReport run_bragg_sim(const FdtdConfig& config,
                          const LongitudinalStructure& structure,
                          const BraggSpec& bragg, FdtdTrace* trace) {
    bragg.validate();
    if (bragg.periods > 0) {
        const double stack_left = bragg.end_face_x - bragg.trench_width -
                                  bragg.periods * (bragg.high_length + bragg.low_length);
        const double left_monitor = -(0.5 * config.window_x -
                                      config.pml_cells * config.cell -
                                      config.guided_monitor_margin);
        if (stack_left <= left_monitor)
            throw std::invalid_argument(
                "Bragg stack extends past the left guided monitor");
    }
    Sim sim(config, structure, bragg.periods > 0 ? &bragg : nullptr);
    BraggReport r;
    r.power = sim.run(trace);
    if (structure.waveguide_present) {
        Sim hom(config, LongitudinalStructure::homogeneous(structure.spec), nullptr);
        r.power.p_homogeneous = hom.run(nullptr).p_total;
    }
    const double lr = r.power.p_left_guided + r.power.p_right_guided;
    r.directionality = lr > 0 ? r.power.p_right_guided / lr : 0.0;
    return r;
}

std::vector<PurcellRow> purcell_scan(const FdtdConfig& config,
                                     const LongitudinalStructure& structure,
                                     const std::vector<std::pair<double, double>>& positions) {
    std::vector<PurcellRow> rows;
    double p_hom = 0;
    {
        Sim hom(config, LongitudinalStructure::homogeneous(structure.spec), nullptr);
        p_hom = hom.run(nullptr).p_total;
    }
    for (const auto& [x, y] : positions) {
        FdtdConfig c = config;
        c.source_x = x;
        c.source_y = y;
        Sim sim(c, structure, nullptr);
        const PowerReport rep = sim.run(nullptr);
        PurcellRow row;
        row.x = x;
        row.y = y;
        row.p_total = rep.p_total;
        row.ratio = p_hom > 0 ? rep.p_total / p_hom : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string fdtd_snapshot_csv(const FdtdConfig& config,
                              const LongitudinalStructure& structure,
                              const std::optional<BraggSpec>& bragg, int at_step) {
    Sim sim(config, structure, bragg && bragg->periods > 0 ? &*bragg : nullptr);
    return sim.snapshot_csv(at_step);
}

}  // namespace molwg
