#include "molwg/mode_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace molwg {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Assemble the full-vector operator A with A f = beta^2 f, f = [Ex; Ey].
SpMat assemble_operator(const ScalarField2D& eps, double k0) {
    const Grid2D& g = eps.grid;
    const int nx = g.nx(), ny = g.ny();
    const int n = nx * ny;
    const double h = g.spacing;
    // operator scaled by 1/k0^2 so eigenvalues are n_eff^2 and O(1)
    const double inv_h2 = 1.0 / (h * h * k0 * k0);
    const double inv_4h2 = 0.25 * inv_h2;
    const double k2 = 1.0;

    auto idx = [nx](int i, int j) { return j * nx + i; };
    auto e = [&](int i, int j) { return eps.at(i, j); };

    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(n) * 14);

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int row_x = idx(i, j);
            const int row_y = n + idx(i, j);
            const double ec = e(i, j);
            double diag_x = k2 * ec - 2.0 * inv_h2;  // y Laplacian diagonal
            double diag_y = k2 * ec - 2.0 * inv_h2;  // x Laplacian diagonal

            // --- Ex equation ---
            // dx[(1/e) dx(e Ex)]: flux form, D-continuity across vertical faces
            {
                double acc = 0;
                if (i + 1 < nx) {
                    const double em = 0.5 * (ec + e(i + 1, j));
                    trip.emplace_back(row_x, idx(i + 1, j), inv_h2 * e(i + 1, j) / em);
                    acc -= inv_h2 * ec / em;
                } else {
                    acc -= inv_h2;  // zero field outside, eps continued
                }
                if (i - 1 >= 0) {
                    const double em = 0.5 * (ec + e(i - 1, j));
                    trip.emplace_back(row_x, idx(i - 1, j), inv_h2 * e(i - 1, j) / em);
                    acc -= inv_h2 * ec / em;
                } else {
                    acc -= inv_h2;
                }
                diag_x += acc;
            }
            // dyy Ex
            if (j + 1 < ny) trip.emplace_back(row_x, idx(i, j + 1), inv_h2);
            if (j - 1 >= 0) trip.emplace_back(row_x, idx(i, j - 1), inv_h2);
            trip.emplace_back(row_x, row_x, diag_x);
            // cross: dx[(1/e) dy(e Ey) - dy Ey]
            for (int sx : {+1, -1}) {
                const int ii = i + sx;
                if (ii < 0 || ii >= nx) continue;
                const double ecc = e(ii, j);
                for (int sy : {+1, -1}) {
                    const int jj = j + sy;
                    if (jj < 0 || jj >= ny) continue;
                    const double ratio = e(ii, jj) / ecc - 1.0;
                    if (ratio == 0.0) continue;
                    trip.emplace_back(row_x, n + idx(ii, jj),
                                      inv_4h2 * sx * sy * ratio);
                }
            }

            // --- Ey equation ---
            // dy[(1/e) dy(e Ey)]
            {
                double acc = 0;
                if (j + 1 < ny) {
                    const double em = 0.5 * (ec + e(i, j + 1));
                    trip.emplace_back(row_y, n + idx(i, j + 1), inv_h2 * e(i, j + 1) / em);
                    acc -= inv_h2 * ec / em;
                } else {
                    acc -= inv_h2;
                }
                if (j - 1 >= 0) {
                    const double em = 0.5 * (ec + e(i, j - 1));
                    trip.emplace_back(row_y, n + idx(i, j - 1), inv_h2 * e(i, j - 1) / em);
                    acc -= inv_h2 * ec / em;
                } else {
                    acc -= inv_h2;
                }
                diag_y += acc;
            }
            // dxx Ey
            if (i + 1 < nx) trip.emplace_back(row_y, n + idx(i + 1, j), inv_h2);
            if (i - 1 >= 0) trip.emplace_back(row_y, n + idx(i - 1, j), inv_h2);
            trip.emplace_back(row_y, row_y, diag_y);
            // cross: dy[(1/e) dx(e Ex) - dx Ex]
            for (int sy : {+1, -1}) {
                const int jj = j + sy;
                if (jj < 0 || jj >= ny) continue;
                const double ecc = e(i, jj);
                for (int sx : {+1, -1}) {
                    const int ii = i + sx;
                    if (ii < 0 || ii >= nx) continue;
                    const double ratio = e(ii, jj) / ecc - 1.0;
                    if (ratio == 0.0) continue;
                    trip.emplace_back(row_y, idx(ii, jj),
                                      inv_4h2 * sx * sy * ratio);
                }
            }
        }
    }

    SpMat a(2 * n, 2 * n);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    return a;
}

// deterministic pseudo-random start vector
Eigen::VectorXd start_vector(int n) {
    Eigen::VectorXd v(n);
    uint64_t s = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < n; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        v[i] = static_cast<double>(s % 10000) / 5000.0 - 1.0;
    }
    v.normalize();
    return v;
}

struct RitzMode {
    double lambda;  // beta^2
    Eigen::VectorXd vec;
    double residual;
};

// eigenvalues of `a` are n_eff^2
std::vector<RitzMode> shift_invert_arnoldi(const SpMat& a, double sigma,
                                           double n_lo, double n_hi,
                                           int count, const ModeSolverOptions& opts,
                                           std::string* diag) {
    const int dim = static_cast<int>(a.rows());
    SpMat shifted = a;
    for (int i = 0; i < dim; ++i) shifted.coeffRef(i, i) -= sigma;
    shifted.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(shifted);
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("mode solver: sparse LU factorization failed");

    int m = std::min(opts.krylov_dim, dim);
    std::vector<RitzMode> accepted;
    while (true) {
        accepted.clear();
        Eigen::MatrixXd v(dim, m + 1);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
        v.col(0) = start_vector(dim);
        int steps = m;
        for (int k = 0; k < m; ++k) {
            Eigen::VectorXd w = lu.solve(v.col(k));
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= k; ++i) {
                    const double c = v.col(i).dot(w);
                    w -= c * v.col(i);
                    hess(i, k) += c;
                }
            }
            const double nrm = w.norm();
            hess(k + 1, k) = nrm;
            if (nrm < 1e-12) {
                steps = k + 1;
                break;
            }
            v.col(k + 1) = w / nrm;
        }

        Eigen::EigenSolver<Eigen::MatrixXd> es(hess.topLeftCorner(steps, steps));
        struct Cand { double lambda; int idx; };
        std::vector<Cand> cands;
        for (int i = 0; i < steps; ++i) {
            const std::complex<double> theta = es.eigenvalues()[i];
            if (std::abs(theta) < 1e-14) continue;
            const std::complex<double> lam = sigma + 1.0 / theta;
            if (std::abs(lam.imag()) > 1e-6 * std::abs(lam.real())) continue;
            if (lam.real() <= 0) continue;
            const double neff = std::sqrt(lam.real());
            if (neff <= n_lo || neff >= n_hi) continue;
            cands.push_back({lam.real(), i});
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Cand& x, const Cand& y) { return x.lambda > y.lambda; });

        for (const Cand& c : cands) {
            Eigen::VectorXd x =
                v.leftCols(steps) * es.eigenvectors().col(c.idx).real();
            if (x.norm() < 1e-12) continue;
            x.normalize();
            // inverse-iteration polish
            double lambda = c.lambda;
            for (int it = 0; it < 4; ++it) {
                const double res = (a * x - lambda * x).norm() / std::abs(lambda);
                if (res < opts.residual_tol) break;
                x = lu.solve(x);
                x.normalize();
                lambda = x.dot(a * x);
            }
            const double res = (a * x - lambda * x).norm() / std::abs(lambda);
            if (res > opts.residual_tol) continue;
            const double neff = std::sqrt(lambda);
            if (neff <= n_lo || neff >= n_hi) continue;
            bool dup = false;
            for (const RitzMode& r : accepted)
                if (std::abs(r.vec.dot(x)) > 0.5) dup = true;
            if (dup) continue;
            accepted.push_back({lambda, x, res});
            if (static_cast<int>(accepted.size()) >= count) break;
        }

        if (static_cast<int>(accepted.size()) >= count || m >= opts.max_krylov_dim ||
            m >= dim)
            break;
        m = std::min({2 * m, opts.max_krylov_dim, dim});
    }
    if (diag) {
        std::ostringstream os;
        os << "krylov_dim=" << m << " accepted=" << accepted.size();
        *diag = os.str();
    }
    return accepted;
}

}  // namespace

double GuidedMode::field_sq(int i, int j) const {
    const size_t k = static_cast<size_t>(j) * grid.nx() + i;
    return ex[k] * ex[k] + ey[k] * ey[k] + ez[k] * ez[k];
}

std::vector<GuidedMode> solve_modes(const WaveguideSpec& spec, const Grid2D& grid,
                                    int count, const ModeSolverOptions& opts) {
    spec.validate();
    grid.validate();
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    const double n_core = spec.core.refractive_index;
    const double n_lo =
        std::max(spec.substrate.refractive_index, spec.cladding.refractive_index);
    if (n_core <= n_lo)
        throw std::runtime_error(
            "cutoff: core index does not exceed substrate/cladding, no guided mode");

    const ScalarField2D eps = permittivity_map(spec, grid);
    const double k0 = 2 * pi / spec.wavelength;
    const SpMat a = assemble_operator(eps, k0);
    // Shift between the radiation-continuum edge (n_lo) and the vertical slab
    // effective index, which bracket the channel modes; this keeps the
    // shift-invert separation sharp.
    double n_target = 0.5 * (n_lo + n_core);
    try {
        SlabStack stack{spec.substrate.refractive_index, n_core,
                        spec.cladding.refractive_index, spec.core_thickness};
        n_target = slab_te0_neff(stack, spec.wavelength);
    } catch (const std::runtime_error&) {
        // slab below cutoff; keep the midpoint fallback
    }
    const double sigma = 0.5 * (n_target * n_target + n_lo * n_lo);

    std::string diag;
    std::vector<RitzMode> ritz = shift_invert_arnoldi(
        a, sigma, n_lo * (1.0 + 1e-9), n_core, count, opts, &diag);
    if (ritz.empty())
        throw std::runtime_error("cutoff: no guided mode found (" + diag + ")");

    const int nx = grid.nx(), ny = grid.ny();
    const int n = nx * ny;
    std::vector<GuidedMode> modes;
    for (const RitzMode& r : ritz) {
        GuidedMode m;
        m.grid = grid;
        m.wavelength = spec.wavelength;
        m.n_eff = std::sqrt(r.lambda);
        m.beta = m.n_eff * k0;
        m.residual = r.residual;
        m.ex.assign(n, 0.0);
        m.ey.assign(n, 0.0);
        m.ez.assign(n, 0.0);
        for (int k = 0; k < n; ++k) {
            m.ex[k] = r.vec[k];
            m.ey[k] = r.vec[n + k];
        }
        // longitudinal component from div(eps E) = 0:
        // Ez = (1/(beta*eps)) (dx(eps Ex) + dy(eps Ey))  (90 deg out of phase)
        const double h = grid.spacing;
        auto at = [&](const std::vector<double>& f, int i, int j) {
            if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
            return f[static_cast<size_t>(j) * nx + i] *
                   eps.at(std::clamp(i, 0, nx - 1), std::clamp(j, 0, ny - 1));
        };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double dxe = (at(m.ex, i + 1, j) - at(m.ex, i - 1, j)) / (2 * h);
                const double dye = (at(m.ey, i, j + 1) - at(m.ey, i, j - 1)) / (2 * h);
                m.ez[static_cast<size_t>(j) * nx + i] =
                    (dxe + dye) / (m.beta * eps.at(i, j));
            }
        // normalize to unit peak |E|, fix the sign at the peak node
        double peak = 0;
        int peak_k = 0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double f2 = m.field_sq(i, j);
                if (f2 > peak) {
                    peak = f2;
                    peak_k = j * nx + i;
                }
            }
        double scale = 1.0 / std::sqrt(peak);
        const double dominant =
            std::abs(m.ex[peak_k]) >= std::abs(m.ey[peak_k]) ? m.ex[peak_k] : m.ey[peak_k];
        if (dominant < 0) scale = -scale;
        for (int k = 0; k < n; ++k) {
            m.ex[k] *= scale;
            m.ey[k] *= scale;
            m.ez[k] *= scale;
        }
        double sx = 0, sy = 0;
        for (int k = 0; k < n; ++k) {
            sx += m.ex[k] * m.ex[k];
            sy += m.ey[k] * m.ey[k];
        }
        m.polarization = sx >= sy ? "quasi-TE" : "quasi-TM";
        modes.push_back(std::move(m));
    }
    std::sort(modes.begin(), modes.end(),
              [](const GuidedMode& a_, const GuidedMode& b_) { return a_.n_eff > b_.n_eff; });
    return modes;
}

ModeAreaResult effective_mode_area(const GuidedMode& mode, const ScalarField2D& eps,
                                   const EmitterLocation& r0) {
    const Grid2D& g = mode.grid;
    const int nx = g.nx(), ny = g.ny();
    const double h = g.spacing;

    double numerator = 0;
    double peak = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double f2 = mode.field_sq(i, j);
            numerator += eps.at(i, j) * f2 * h * h;
            peak = std::max(peak, f2);
        }

    auto interp = [&](const std::vector<double>& f) {
        double fx = (r0.x - g.x_at(0)) / h;
        double fy = (r0.y - g.y_at(0)) / h;
        fx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
        fy = std::clamp(fy, 0.0, static_cast<double>(ny - 1));
        const int i0 = std::min(static_cast<int>(fx), nx - 2);
        const int j0 = std::min(static_cast<int>(fy), ny - 2);
        const double ax = fx - i0, ay = fy - j0;
        auto v = [&](int i, int j) { return f[static_cast<size_t>(j) * nx + i]; };
        return (1 - ax) * (1 - ay) * v(i0, j0) + ax * (1 - ay) * v(i0 + 1, j0) +
               (1 - ax) * ay * v(i0, j0 + 1) + ax * ay * v(i0 + 1, j0 + 1);
    };
    if (r0.x < g.x_at(0) || r0.x > g.x_at(nx - 1) || r0.y < g.y_at(0) ||
        r0.y > g.y_at(ny - 1))
        throw std::invalid_argument("emitter position outside the mode grid");
    const double exv = interp(mode.ex), eyv = interp(mode.ey), ezv = interp(mode.ez);
    const double f2r0 = exv * exv + eyv * eyv + ezv * ezv;
    if (f2r0 < 1e-10 * peak) {
        std::ostringstream os;
        os << "field magnitude at emitter is ~0 (|E|^2 = " << f2r0
           << " vs peak " << peak << ")";
        throw std::runtime_error(os.str());
    }

    ModeAreaResult res;
    res.r0 = r0;
    res.field_sq_at_r0 = f2r0;
    res.a_eff = numerator / (r0.eps_local * f2r0);
    res.a_eff_over_lambda_sq = res.a_eff / (mode.wavelength * mode.wavelength);
    return res;
}

GroupVelocityResult group_velocity(const WaveguideSpec& spec, const Grid2D& grid,
                                   double relative_step) {
    spec.validate();
    GroupVelocityResult r;
    const double omega0 = omega_from_wavelength(spec.wavelength);
    r.delta_omega = 2.0 * relative_step * omega0;
    if (spec.homogeneous()) {
        // plane wave in a dispersionless medium
        const double n = spec.core.refractive_index;
        r.v_g = c_light / n;
        r.n_eff_plus = r.n_eff_minus = n;
        return r;
    }
    auto beta_at = [&](double omega) {
        WaveguideSpec s = spec;
        s.wavelength = 2 * pi * c_light / omega;
        try {
            return solve_modes(s, grid, 1).front();
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(
                std::string("cutoff proximity: mode lost at shifted frequency (") +
                e.what() + ")");
        }
    };
    const GuidedMode hi = beta_at(omega0 * (1 + relative_step));
    const GuidedMode lo = beta_at(omega0 * (1 - relative_step));
    r.n_eff_plus = hi.n_eff;
    r.n_eff_minus = lo.n_eff;
    r.v_g = r.delta_omega / (hi.beta - lo.beta);
    if (r.v_g <= 0 || r.v_g >= c_light)
        throw std::runtime_error("group velocity outside (0, c); cutoff proximity");
    return r;
}

std::string mode_field_csv(const GuidedMode& mode) {
    std::ostringstream os;
    os.precision(14);
    os << "x[m],y[m],re_ex,im_ex,re_ey,im_ey,re_ez,im_ez\n";
    const int nx = mode.grid.nx(), ny = mode.grid.ny();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t k = static_cast<size_t>(j) * nx + i;
            os << mode.grid.x_at(i) << "," << mode.grid.y_at(j) << "," << mode.ex[k]
               << ",0," << mode.ey[k] << ",0,0," << mode.ez[k] << "\n";
        }
    return os.str();
}

double mode_overlap(const GuidedMode& a, const GuidedMode& b) {
    double dot = 0, na = 0, nb = 0;
    for (size_t k = 0; k < a.ex.size(); ++k) {
        dot += a.ex[k] * b.ex[k] + a.ey[k] * b.ey[k];
        na += a.ex[k] * a.ex[k] + a.ey[k] * a.ey[k];
        nb += b.ex[k] * b.ex[k] + b.ey[k] * b.ey[k];
    }
    return std::abs(dot) / std::sqrt(na * nb);
}

}  // namespace molwg
