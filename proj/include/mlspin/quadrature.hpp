// Small quadrature toolkit: fixed Gauss-Legendre panels, adaptive
// Gauss-Kronrod bisection, and semi-infinite integrals of decaying functions.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace mlspin::quad {

// 16-point Gauss-Legendre rule on [-1,1] (positive half; rule is symmetric).
inline constexpr double gl16_x[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr double gl16_w[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

// Gauss 7 / Kronrod 15 pair on [-1,1].
inline constexpr double k15_x[8] = {
    0.0000000000000000000000000, 0.2077849550078984676006894,
    0.4058451513773971669066064, 0.5860872354676911302941448,
    0.7415311855993944398638648, 0.8648644233597690727897128,
    0.9491079123427585245261897, 0.9914553711208126392068547};
inline constexpr double k15_w[8] = {
    0.2094821410847278280129992, 0.2044329400752988924141620,
    0.1903505780647854099132564, 0.1690047266392679028265834,
    0.1406532597155259187451896, 0.1047900103222501838398763,
    0.0630920926299785532907007, 0.0229353220105292249637320};
inline constexpr double g7_w[4] = {
    0.4179591836734693877551020, 0.3818300505051189449503698,
    0.2797053914892766679014678, 0.1294849661688696932706114};

template <class F>
auto gauss_legendre(F&& f, double a, double b) {
    using R = std::invoke_result_t<F&, double>;
    const double c = (a + b) / 2, r = (b - a) / 2;
    R s{};
    for (int i = 0; i < 8; i++)
        s += gl16_w[i] * (f(c + r * gl16_x[i]) + f(c - r * gl16_x[i]));
    return R(s * r);
}

// One G7/K15 evaluation; err is the |K15-G7| discrepancy and resabs the
// Kronrod estimate of the integral of |f| (the scale of unavoidable roundoff).
template <class F, class R>
R gk15(F& f, double a, double b, double& err, double& resabs) {
    const double c = (a + b) / 2, r = (b - a) / 2;
    R g{}, k{};
    double ab = 0;
    const R fc = f(c);
    k += k15_w[0] * fc;
    g += g7_w[0] * fc;
    ab += k15_w[0] * std::abs(fc);
    for (int i = 1; i < 8; i++) {
        const R v1 = f(c + r * k15_x[i]), v2 = f(c - r * k15_x[i]);
        const R v = v1 + v2;
        k += k15_w[i] * v;
        ab += k15_w[i] * (std::abs(v1) + std::abs(v2));
        if (i % 2 == 0) g += g7_w[i / 2] * v;
    }
    err = std::abs(R(k - g)) * r;
    resabs = ab * r;
    return R(k * r);
}

template <class F, class R>
R gk15(F& f, double a, double b, double& err) {
    double resabs;
    return gk15<F, R>(f, a, b, err, resabs);
}

namespace detail {
// Bisect while the local Kronrod error exceeds the (halved per level) local
// budget.  Two roundoff floors stop the tree from blowing up exponentially:
// `floor` on the global scale (panels where the integrand is negligible would
// otherwise chase estimates made of pure roundoff), and one at 50 eps times
// the panel's own integral of |f| -- below that scale the G7/K15 discrepancy
// is floating-point noise that no amount of splitting can reduce, and because
// the noise is comparable to the threshold a tighter floor turns the recursion
// into a supercritical branching process.
template <class F, class R>
R adaptive_rec(F& f, double a, double b, double tol, double floor, int depth) {
    double err, resabs;
    R whole = gk15<F, R>(f, a, b, err, resabs);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (err <= std::max({tol, floor, 50 * eps * resabs}) || depth <= 0) return whole;
    const double m = (a + b) / 2;
    return adaptive_rec<F, R>(f, a, m, tol / 2, floor, depth - 1) +
           adaptive_rec<F, R>(f, m, b, tol / 2, floor, depth - 1);
}
}    // namespace detail

// Adaptive integral over [a,b].  rel_tol is relative to a first whole-interval
// estimate (plus abs_tol as an absolute floor).
template <class F>
auto adaptive(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
              int max_depth = 100) {
    using R = std::invoke_result_t<F&, double>;
    double err0;
    R first = gk15<F, R>(f, a, b, err0);
    double tol = std::max(std::abs(first) * rel_tol, abs_tol);
    if (tol == 0) tol = rel_tol;
    const double floor = std::abs(first) * 1e-16;
    return detail::adaptive_rec<F, R>(f, a, b, tol, floor, max_depth);
}

// Integral over [a, infinity) of a decaying function: adaptive panels of
// geometrically growing width, stopped once two consecutive panels are
// negligible against the accumulated total.  Later panels inherit an absolute
// tolerance from the accumulated magnitude so that far-tail panels with
// negligible mass are accepted cheaply.
template <class F>
auto semi_infinite(F&& f, double a, double rel_tol = 1e-12, double first_width = 1.0) {
    using R = std::invoke_result_t<F&, double>;
    R total{};
    double lo = a, width = first_width, scale_acc = 0;
    int quiet = 0;
    for (int panel = 0; panel < 200 && quiet < 2; panel++) {
        R part = adaptive(f, lo, lo + width, rel_tol / 10, rel_tol * scale_acc / 10);
        total += part;
        scale_acc = std::max(scale_acc, std::abs(total));
        quiet = (std::abs(part) <= rel_tol * std::max(scale_acc, 1e-300)) ? quiet + 1 : 0;
        lo += width;
        width *= 2;
    }
    return total;
}

// Fixed Gauss-Legendre composite rule over given breakpoints.
template <class F>
auto panels(F&& f, const std::vector<double>& brk) {
    using R = std::invoke_result_t<F&, double>;
    if (brk.size() < 2) throw std::invalid_argument("quad::panels: need at least 2 breakpoints");
    R s{};
    for (std::size_t i = 0; i + 1 < brk.size(); i++) s += gauss_legendre(f, brk[i], brk[i + 1]);
    return s;
}

// Breakpoints a, a+w, a+2w, ... , b (last panel clipped).
inline std::vector<double> uniform_breaks(double a, double b, double w) {
    std::vector<double> out{a};
    while (out.back() + w < b - 1e-12 * (b - a)) out.push_back(out.back() + w);
    out.push_back(b);
    return out;
}

// Geometric refinement towards `a`: [a, a+w0], doubling away until b.
inline std::vector<double> geometric_breaks(double a, double b, double w0) {
    std::vector<double> out{a};
    double w = w0;
    while (out.back() + w < b) {
        out.push_back(out.back() + w);
        w *= 2;
    }
    out.push_back(b);
    return out;
}

}    // namespace mlspin::quad
