// Power-law fitting of decay curves and finite-difference smoothness probes.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mlspin {

struct power_law_fit {
    double exponent = 0;       // p in y ~ amplitude * t^p
    double amplitude = 0;
    double max_log_residual = 0;
    int n_used = 0;
};

// Least squares on (log t, log y) over the window [t_min, t_max].  Samples at
// or below the roundoff floor (1e3 * eps * max y) are excluded so that noise
// plateaus cannot masquerade as shallow decay.  Needs at least 8 usable
// samples.
inline power_law_fit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                                   double t_min, double t_max) {
    if (t.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    double peak = 0;
    for (double v : y) peak = std::max(peak, v);
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * peak;

    std::vector<double> lt, ly;
    for (std::size_t i = 0; i < t.size(); i++) {
        if (t[i] < t_min || t[i] > t_max) continue;
        if (!(t[i] > 0) || !(y[i] > floor)) continue;
        lt.push_back(std::log(t[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lt.size() < 8)
        throw std::invalid_argument("fit_power_law: fewer than 8 usable samples in window");

    const double n = double(lt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); i++) {
        sx += lt[i];
        sy += ly[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 0)) throw std::invalid_argument("fit_power_law: degenerate abscissae");
    power_law_fit fit;
    fit.exponent = (n * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    fit.amplitude = std::exp(intercept);
    fit.n_used = int(lt.size());
    for (std::size_t i = 0; i < lt.size(); i++)
        fit.max_log_residual =
            std::max(fit.max_log_residual, std::abs(ly[i] - (intercept + fit.exponent * lt[i])));
    return fit;
}

struct derivative_probe {
    double value = 0;    // centered difference at the finer step h/2
    double error = 0;    // |D_h - D_{h/2}| / 3, an O(h^2) error estimate
};

// Centered finite-difference derivative of order 1..4 at steps h and h/2.
template <class F>
derivative_probe smoothness_probe(F&& f, double x, int order, double h) {
    if (order < 1 || order > 4) throw std::invalid_argument("smoothness_probe: order in 1..4");
    if (!(h > 0)) throw std::invalid_argument("smoothness_probe: step must be positive");
    auto stencil = [&](double s) {
        switch (order) {
            case 1: return (f(x + s) - f(x - s)) / (2 * s);
            case 2: return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s);
            case 3: return (f(x + 2 * s) - 2 * f(x + s) + 2 * f(x - s) - f(x - 2 * s)) /
                           (2 * s * s * s);
            default:
                return (f(x + 2 * s) - 4 * f(x + s) + 6 * f(x) - 4 * f(x - s) + f(x - 2 * s)) /
                       (s * s * s * s);
        }
    };
    const double dh = stencil(h), dh2 = stencil(h / 2);
    return {dh2, std::abs(dh - dh2) / 3};
}

}    // namespace mlspin
