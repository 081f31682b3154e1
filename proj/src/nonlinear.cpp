#include "molwg/nonlinear.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace molwg {

void NonlinearParams::validate() const {
    if (gamma <= 0) throw std::invalid_argument("gamma must be positive");
    if (eta < 0 || eta > 1) throw std::invalid_argument("eta must lie in [0,1]");
    if (gamma_wg_fraction < 0)
        throw std::invalid_argument("gamma_wg fraction must be >= 0");
    if (photon_numbers.empty())
        throw std::invalid_argument("at least one photon number required");
    for (int m : photon_numbers)
        if (m < 1) throw std::invalid_argument("photon numbers must be >= 1");
}

double stark_shift(double g_sq, double delta, double gamma) {
    if (gamma <= 0) throw std::invalid_argument("gamma must be positive");
    return g_sq * delta / (delta * delta + 0.25 * gamma * gamma + 2.0 * g_sq);
}

double phase_per_photon(int m, double delta, const NonlinearParams& p) {
    p.validate();
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const double g = p.gamma;
    const double denom = delta * delta + 0.25 * g * g;
    return -delta / (2.0 * m * g) * std::log1p(2.0 * m * p.g0_sq() / denom);
}

double differential_phase(double delta, const NonlinearParams& p) {
    return phase_per_photon(1, delta, p) - phase_per_photon(2, delta, p);
}

double extinction(int m, double delta, const NonlinearParams& p) {
    p.validate();
    if (delta == 0.0) {
        // limit of G|phi|/|delta| as delta -> 0
        const double arg = 8.0 * m * p.eta * p.gamma_wg_fraction;
        return 1.0 - std::pow(1.0 + arg, -1.0 / (2.0 * m));
    }
    const double phi = phase_per_photon(m, delta, p);
    return 1.0 - std::exp(-p.gamma * std::abs(phi) / std::abs(delta));
}

double transmission_amplitude(int m, double delta, const NonlinearParams& p) {
    return std::sqrt(1.0 - extinction(m, delta, p));
}

PhaseResponse scan(const NonlinearParams& p, double delta_lo, double delta_hi,
                   int samples) {
    p.validate();
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    PhaseResponse r;
    r.photon_numbers = p.photon_numbers;
    r.delta.resize(samples);
    const double step = (delta_hi - delta_lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) r.delta[i] = delta_lo + i * step;
    r.phase.resize(p.photon_numbers.size());
    r.extinction.resize(p.photon_numbers.size());
    for (size_t k = 0; k < p.photon_numbers.size(); ++k) {
        r.phase[k].resize(samples);
        r.extinction[k].resize(samples);
        for (int i = 0; i < samples; ++i) {
            r.phase[k][i] = phase_per_photon(p.photon_numbers[k], r.delta[i], p);
            r.extinction[k][i] = extinction(p.photon_numbers[k], r.delta[i], p);
        }
    }
    bool has1 = false, has2 = false;
    for (int m : p.photon_numbers) {
        has1 |= (m == 1);
        has2 |= (m == 2);
    }
    if (has1 && has2) {
        r.differential.resize(samples);
        for (int i = 0; i < samples; ++i)
            r.differential[i] = differential_phase(r.delta[i], p);
    }
    return r;
}

namespace {

// maximize f on [a,b] by golden-section
double golden_max(const std::function<double(double)>& f, double a, double b) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

PeakResult find_peak(const PhaseResponse& r, const NonlinearParams& p,
                     const std::string& column) {
    if (r.delta.empty()) throw std::invalid_argument("empty response");
    std::function<double(double)> f;
    if (column == "differential") {
        f = [&p](double d) { return std::abs(differential_phase(d, p)); };
    } else {
        const auto colon = column.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("unknown column: " + column);
        const std::string kind = column.substr(0, colon);
        const int m = std::stoi(column.substr(colon + 1));
        if (kind == "phase")
            f = [m, &p](double d) { return std::abs(phase_per_photon(m, d, p)); };
        else if (kind == "extinction")
            f = [m, &p](double d) { return extinction(m, d, p); };
        else
            throw std::invalid_argument("unknown column: " + column);
    }

    // grid argmax, ties toward smaller |delta|
    size_t best = 0;
    double best_val = -1.0;
    for (size_t i = 0; i < r.delta.size(); ++i) {
        const double v = f(r.delta[i]);
        if (v > best_val + 1e-18 ||
            (std::abs(v - best_val) <= 1e-18 &&
             std::abs(r.delta[i]) < std::abs(r.delta[best])))
        {
            best = i;
            best_val = v;
        }
    }
    PeakResult out;
    if (best_val < 1e-15) {
        out.degenerate = true;
        return out;
    }
    const double lo = best > 0 ? r.delta[best - 1] : r.delta[best];
    const double hi = best + 1 < r.delta.size() ? r.delta[best + 1] : r.delta[best];
    out.delta = lo < hi ? golden_max(f, lo, hi) : r.delta[best];
    out.value = f(out.delta);
    return out;
}

std::string phase_response_csv(const PhaseResponse& r, double gamma) {
    std::ostringstream os;
    os.precision(14);
    os << "delta_over_gamma[1]";
    for (int m : r.photon_numbers) os << ",abs_phase_m" << m << "[rad]";
    if (!r.differential.empty()) os << ",abs_differential[rad]";
    for (int m : r.photon_numbers) os << ",extinction_m" << m << "[1]";
    os << "\n";
    for (size_t i = 0; i < r.delta.size(); ++i) {
        os << r.delta[i] / gamma;
        for (size_t k = 0; k < r.photon_numbers.size(); ++k)
            os << "," << std::abs(r.phase[k][i]);
        if (!r.differential.empty()) os << "," << std::abs(r.differential[i]);
        for (size_t k = 0; k < r.photon_numbers.size(); ++k)
            os << "," << r.extinction[k][i];
        os << "\n";
    }
    return os.str();
}

}  // namespace molwg
