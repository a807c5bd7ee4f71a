// Free-field resolvent kernels of the plane near the spectral threshold:
// Hankel-function representation, the logarithmic comparison kernel, a
// cancellation-free remainder series with two derivatives, weighted
// Hilbert-Schmidt surrogates of kernel norms, charge-smoothed resolvent
// profiles along the imaginary frequency axis, and high-frequency decay
// fits of the response building blocks.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mlspin/charge.hpp"
#include "mlspin/fitting.hpp"
#include "mlspin/laplace.hpp"
#include "mlspin/quadrature.hpp"
#include "mlspin/special_functions.hpp"

namespace mlspin {

enum class branch { plus, minus };

inline int branch_sign(branch b) { return b == branch::plus ? 1 : -1; }

// Additive constant in the small-argument form -log(zeta|z|)/(2 pi) + h of
// the resolvent kernel.  The Hankel expansion
//   (i/4) H0+(s) = i/4 - (log s - log 2 + gamma)/(2 pi) + O(s^2 log s)
// fixes h+ = i/4 + (log 2 - gamma)/(2 pi); the minus branch is conjugate.
inline cplx log_kernel_constant(branch b) {
    return {(std::log(2.0) - sf::euler_gamma) / (2 * pi), branch_sign(b) * 0.25};
}

// Kernel of the free resolvent at spectral parameter zeta^2 and separation
// dist = |z|:  +-(i/4) H0^{+-}(zeta |z|).
inline cplx resolvent_kernel(double zeta, double dist, branch b) {
    if (!(zeta > 0) || !(dist > 0))
        throw std::invalid_argument("resolvent_kernel: zeta and |z| must be positive");
    const int sg = branch_sign(b);
    return cplx(0, sg * 0.25) * sf::hankel0(zeta * dist, sg);
}

// Logarithmic comparison kernel -log(zeta |z|)/(2 pi) + h.
inline cplx log_kernel(double zeta, double dist, branch b) {
    if (!(zeta > 0) || !(dist > 0))
        throw std::invalid_argument("log_kernel: zeta and |z| must be positive");
    return cplx(-std::log(zeta * dist) / (2 * pi), 0) + log_kernel_constant(b);
}

namespace detail {

// Power-series pieces around s = 0 used to assemble the kernel remainder
// without subtracting large logarithms:
//   j0m1  = J0(s) - 1              = sum_{m>=1} (-1)^m t^m/(m!)^2,  t = s^2/4
//   j1sum = 2 J1(s)/s              = sum_{m>=0} (-1)^m t^m/(m!(m+1)!)
//   b     = sum_{m>=1} (-1)^{m+1} H_m t^m/(m!)^2      (Y0 companion series)
//   dbsum = sum_{m>=1} (-1)^{m+1} H_m m t^{m-1}/(m!)^2    (b' = (s/2) dbsum)
//   d2b   = sum_{m>=1} (-1)^{m+1} H_m m (m-1/2) t^{m-1}/(m!)^2  (= b'')
struct threshold_series {
    double j0m1 = 0, j1sum = 0, b = 0, dbsum = 0, d2b = 0;
};

inline threshold_series threshold_terms(double s) {
    const double t = s * s / 4;
    threshold_series r;
    double base = -1.0, h = 1.0;    // base = (-1)^m t^{m-1}/(m!)^2 at m = 1
    for (int m = 1; m < 60; m++) {
        r.j0m1 += base * t;
        r.b -= base * t * h;
        r.dbsum -= base * h * m;
        r.d2b -= base * h * m * (m - 0.5);
        if (std::abs(base) * (t + 1) * (h + 1) * m * m < 1e-22 * (1 + std::abs(r.b))) break;
        base *= -t / double((m + 1) * (m + 1));
        h += 1.0 / (m + 1);
    }
    double term = 1.0;
    for (int m = 0; m < 60; m++) {
        r.j1sum += term;
        term *= -t / (double(m + 1) * (m + 2));
        if (std::abs(term) < 1e-22) break;
    }
    return r;
}

}    // namespace detail

// Remainder E(s) = +-(i/4)H0^{+-}(s) + log(s)/(2 pi) - h and its first two
// s-derivatives.  Below `series_cut` the three values are summed termwise so
// no large log terms cancel; above it the Hankel functions are used directly.
struct remainder_values {
    cplx e, de, d2e;
};

inline constexpr double remainder_series_cut = 1.0;

inline remainder_values resolvent_remainder(double s, branch b) {
    if (!(s > 0) || s >= 1e4)
        throw std::domain_error("resolvent_remainder: s outside (0, 1e4)");
    const int sg = branch_sign(b);
    const double tp = 2 * pi;
    if (s < remainder_series_cut) {
        const auto ts = detail::threshold_terms(s);
        const cplx L(-(std::log(s / 2) + sf::euler_gamma) / tp, sg * 0.25);
        const double j0 = 1 + ts.j0m1;
        const double j1 = s / 2 * ts.j1sum;
        remainder_values r;
        r.e = ts.j0m1 * L - ts.b / tp;
        r.de = -j1 * L - cplx(ts.j0m1 / (tp * s) + (s / 2) * ts.dbsum / tp, 0);
        r.d2e = (-j0 + ts.j1sum / 2) * L +
                cplx(ts.j1sum / tp + ts.j0m1 / (tp * s * s) - ts.d2b / tp, 0);
        return r;
    }
    const cplx pref(0, sg * 0.25);
    const cplx h0 = sf::hankel0(s, sg);
    const cplx h1(sf::bessel_j1(s), sg * sf::bessel_y1(s));
    remainder_values r;
    r.e = pref * h0 + cplx(std::log(s) / tp, 0) - log_kernel_constant(b);
    r.de = -pref * h1 + cplx(1 / (tp * s), 0);
    r.d2e = pref * (-h0 + h1 / s) - cplx(1 / (tp * s * s), 0);
    return r;
}

// ---------------------------------------------------------------------------
// Weighted Hilbert-Schmidt surrogates.  For radial kernels K(x,y) = F(|x-y|)
// between the weighted spaces with weight (1+|x|^2)^{-beta}, truncated to
// |x|, |y| <= R, the squared Hilbert-Schmidt norm reduces to
//   HS^2 = 2 pi int_0^{2R} |F(r)|^2 w(r) r dr,
// where w is the rotation-invariant pair correlation of the weight.

// w(r) = int_{|x|<=R, |x-r e|<=R} (1+|x|^2)^{-beta} (1+|x-r e|^2)^{-beta} dx.
class weight_correlation {
  public:
    weight_correlation(double beta, double radius) : beta_(beta), radius_(radius) {
        if (!(beta > 0) || !(radius > 0))
            throw std::invalid_argument("weight_correlation: beta and radius must be positive");
    }

    double beta() const { return beta_; }
    double radius() const { return radius_; }

    double operator()(double r) const {
        if (r < 0) throw std::invalid_argument("weight_correlation: separation must be >= 0");
        if (r >= 2 * radius_) return 0.0;    // supports no longer overlap
        const double lo = std::max(0.0, r - radius_);
        auto ring = [&](double rho) {
            // admissible polar angle: |x - r e|^2 = rho^2 + r^2 - 2 rho r cos phi <= R^2
            double phi_max = pi;
            const double denom = 2 * rho * r;
            if (denom > 0) {
                const double cmin = (rho * rho + r * r - radius_ * radius_) / denom;
                phi_max = std::acos(std::clamp(cmin, -1.0, 1.0));
            } else if (rho * rho + r * r > radius_ * radius_) {
                phi_max = 0.0;
            }
            if (phi_max == 0.0) return 0.0;
            const double aa = 1 + rho * rho + r * r;
            auto ang = [&](double phi) {
                return std::pow(aa - denom * std::cos(phi), -beta_);
            };
            return 2 * std::pow(1 + rho * rho, -beta_) * rho *
                   quad::adaptive(ang, 0.0, phi_max, 1e-11);
        };
        return quad::adaptive(ring, lo, radius_, 1e-10);
    }

  private:
    double beta_, radius_;
};

// Caches the pair correlation on a fixed composite Gauss-Legendre grid over
// [0, 2R] and evaluates HS norms of radial kernel profiles against it.
class weighted_kernel_probe {
  public:
    explicit weighted_kernel_probe(double beta = 3.0, double radius = 40.0, double panel = 2.0)
        : beta_(beta), radius_(radius) {
        if (!(panel > 0)) throw std::invalid_argument("weighted_kernel_probe: bad panel width");
        const weight_correlation w(beta, radius);
        const auto brk = quad::uniform_breaks(0.0, 2 * radius, panel);
        for (std::size_t p = 0; p + 1 < brk.size(); p++) {
            const double c = (brk[p] + brk[p + 1]) / 2, h = (brk[p + 1] - brk[p]) / 2;
            for (int i = 0; i < 8; i++)
                for (double sgn : {1.0, -1.0}) {
                    const double r = c + sgn * h * quad::gl16_x[i];
                    r_.push_back(r);
                    wq_.push_back(quad::gl16_w[i] * h);
                    corr_.push_back(w(r));
                }
        }
    }

    double beta() const { return beta_; }
    double radius() const { return radius_; }

    // HS surrogate of a radial kernel profile F(r).
    double hs_norm(const std::function<cplx(double)>& f) const {
        double acc = 0;
        for (std::size_t j = 0; j < r_.size(); j++)
            acc += wq_[j] * std::norm(f(r_[j])) * corr_[j] * r_[j];
        return std::sqrt(2 * pi * acc);
    }

    // HS surrogate of the k-th zeta-derivative of (resolvent - log kernel):
    // the kernel is |z|^k E^{(k)}(zeta |z|).
    double threshold_norm(double zeta, int k, branch b = branch::plus) const {
        if (!(zeta > 0)) throw std::invalid_argument("threshold_norm: zeta must be positive");
        if (k < 0 || k > 2) throw std::invalid_argument("threshold_norm: k must be 0, 1 or 2");
        return hs_norm([&](double r) -> cplx {
            const remainder_values v = resolvent_remainder(zeta * r, b);
            const cplx d = (k == 0) ? v.e : (k == 1) ? v.de : v.d2e;
            return std::pow(r, k) * d;
        });
    }

  private:
    double beta_, radius_;
    std::vector<double> r_, wq_, corr_;
};

// Log-log fit of the HS surrogate across a zeta window near the threshold.
struct exponent_scan {
    std::vector<double> x, norm;
    power_law_fit fit;
};

inline exponent_scan threshold_exponent_fit(const weighted_kernel_probe& probe, int k,
                                            branch b = branch::plus, double zeta_min = 1e-3,
                                            double zeta_max = 1e-1, int samples = 17) {
    if (samples < 8) throw std::invalid_argument("threshold_exponent_fit: need >= 8 samples");
    exponent_scan out;
    const double step = std::log(zeta_max / zeta_min) / (samples - 1);
    for (int i = 0; i < samples; i++) {
        const double z = zeta_min * std::exp(i * step);
        out.x.push_back(z);
        out.norm.push_back(probe.threshold_norm(z, k, b));
    }
    out.fit = fit_power_law(out.x, out.norm, zeta_min * 0.999, zeta_max * 1.001);
    return out;
}

// ---------------------------------------------------------------------------
// Charge-smoothed kernels.  The vector bump x rho(|x|) smoothed with a radial
// scalar kernel K produces a field profile(s) * y-hat with
//   profile(s) = int K(|x - s e1|) (x . e1) rho(|x|) dx.

// Physical-space radial profile of the charge bump, from the inverse Hankel
// transform rho(r) = int_0^inf rho1(k) J0(kr) k dk.
inline double density_radial(const charge_model& c, double r) {
    if (r < 0) throw std::invalid_argument("density_radial: r must be >= 0");
    auto f = [&](double k) {
        const double x = k * r;
        const double j0 = (x < 1e-8) ? 1.0 : sf::bessel_j0(x);
        return c.rho1(k) * j0 * k;
    };
    return quad::semi_infinite(f, 0.0, 1e-12);
}

// Polar quadrature over the bump support.  The radial density is tabulated
// once on a dense uniform mesh (cubic interpolation in between); each profile
// evaluation runs an adaptive radial integral split at the field point, where
// the angular average of a log-type kernel has an (r - s) log|r - s| kink
// that a fixed panel layout would resolve only when s lands on a panel edge.
class charge_smoother {
  public:
    explicit charge_smoother(const charge_model& c, double support = 14.0)
        : support_(support) {
        if (!(support > 1)) throw std::invalid_argument("charge_smoother: support too small");
        const int n = int(std::ceil(support_ / step_)) + 3;
        dens_.reserve(n + 1);
        for (int i = 0; i <= n; i++) dens_.push_back(density_radial(c, i * step_));
    }

    // Cubic interpolation of the tabulated radial density.
    double density(double r) const {
        const double u = r / step_;
        long j = long(std::floor(u)) - 1;
        j = std::max(0L, std::min(j, long(dens_.size()) - 4));
        const double t = u - double(j);    // in [1, 2] for interior points
        const double w0 = -(t - 1) * (t - 2) * (t - 3) / 6;
        const double w1 = t * (t - 2) * (t - 3) / 2;
        const double w2 = -t * (t - 1) * (t - 3) / 2;
        const double w3 = t * (t - 1) * (t - 2) / 6;
        return w0 * dens_[j] + w1 * dens_[j + 1] + w2 * dens_[j + 2] + w3 * dens_[j + 3];
    }

    // profile(s) for a radial kernel K(dist); kernel arguments are floored at
    // 1e-9 to sidestep the integrable singularity at coincident points.
    template <class K>
    auto profile(K&& kernel, double s) const {
        using R = std::invoke_result_t<K&, double>;
        auto radial = [&](double r) -> R {
            auto ang = [&](double phi) -> R {
                const double d2 = r * r + s * s - 2 * r * s * std::cos(phi);
                const double d = std::max(std::sqrt(std::max(d2, 0.0)), 1e-9);
                return R(std::cos(phi) * kernel(d));
            };
            // geometric refinement towards phi = 0, where the kernel peaks
            // once r is close to s
            auto brk = quad::geometric_breaks(0.0, pi, 1e-6);
            return R(2.0 * r * r * density(r) * quad::panels(ang, brk));
        };
        R acc{};
        const double cut = std::min(std::max(s, 0.0), support_);
        if (cut > 0) acc += quad::adaptive(radial, 0.0, cut, 1e-9);
        if (cut < support_) acc += quad::adaptive(radial, cut, support_, 1e-9);
        return acc;
    }

  private:
    double support_;
    double step_ = 0.01;
    std::vector<double> dens_;
};

namespace detail {

// k-space ingredients of the smoothed resolvent: with u = k^2,
// f_s(u) = rho1'(sqrt u) J1(sqrt(u) s)  and its u-derivative.
struct smoothed_integrand {
    const charge_model& c;
    double s;

    double f(double u) const {
        const double k = std::sqrt(u);
        const double x = k * s;
        const double j1 = (x < 1e-8) ? x / 2 : sf::bessel_j1(x);
        return c.drho1(k) * j1;
    }
    double df(double u) const {
        const double k = std::sqrt(std::max(u, 1e-16));
        const double x = k * s;
        const double j1 = (x < 1e-8) ? x / 2 : sf::bessel_j1(x);
        const double j0 = (x < 1e-8) ? 1.0 : sf::bessel_j0(x);
        const double dj1 = (x < 1e-8) ? 0.5 : j0 - j1 / x;
        return (c.d2rho1(k) * j1 + c.drho1(k) * s * dj1) / (2 * k);
    }
};

}    // namespace detail

// Smoothed free resolvent on the imaginary axis, evaluated in k-space.  The
// boundary kernel is 1/(u - mu^2 + i0) = p.v. - i pi delta, so
//   profile(s) = -(1/2) [ p.v. int f_s(u)/(u - mu^2) du - i pi f_s(mu^2) ].
inline cplx smoothed_resolvent_profile(const charge_model& c, double mu, double s) {
    if (!(mu > 0)) throw std::invalid_argument("smoothed_resolvent_profile: mu must be > 0");
    const detail::smoothed_integrand gi{c, s};
    const double u0 = mu * mu;
    auto f = [&](double u) { return gi.f(u); };
    auto df = [&](double u) { return gi.df(u); };
    const double pv = principal_value(f, df, u0);
    return cplx(-0.5 * pv, 0.5 * pi * gi.f(u0));
}

// Zero-frequency (static) smoothed kernel: profile of the inverse Laplacian,
// -(1/2) int f_s(u)/u du, equal to the log-kernel convolution.  The ratio
// f_s(u)/u tends to a finite limit at u = 0, so a floor on u suffices.
inline double smoothed_static_profile(const charge_model& c, double s) {
    const detail::smoothed_integrand gi{c, s};
    auto g = [&](double u) {
        const double uu = std::max(u, 1e-14);
        return gi.f(uu) / uu;
    };
    return -0.5 * quad::semi_infinite(g, 0.0, 1e-12);
}

// Difference profile (g(i mu + 0) - g(0)) rho with the mu^2 prefactor made
// explicit, so the value is stable down to mu -> 0:
//   -(mu^2/2) p.v. int (f_s(u)/u)/(u - mu^2) du + (i pi/2) f_s(mu^2).
inline cplx smoothed_resolvent_difference(const charge_model& c, double mu, double s) {
    if (!(mu > 0))
        throw std::invalid_argument("smoothed_resolvent_difference: mu must be > 0");
    const detail::smoothed_integrand gi{c, s};
    const double u0 = mu * mu;
    auto f = [&](double u) {
        const double uu = std::max(u, 1e-14);
        return gi.f(uu) / uu;
    };
    auto df = [&](double u) {
        const double uu = std::max(u, 1e-14);
        return (gi.df(uu) * uu - gi.f(uu)) / (uu * uu);
    };
    const double pv = principal_value(f, df, u0);
    return cplx(-u0 / 2 * pv, pi / 2 * gi.f(u0));
}

// Epsilon-shifted oracle: the same smoothed resolvent at complex lambda just
// off the imaginary axis, by direct semi-infinite quadrature (no principal
// value machinery).
inline cplx smoothed_resolvent_profile_shifted(const charge_model& c, cplx lambda, double s) {
    const detail::smoothed_integrand gi{c, s};
    const cplx l2 = lambda * lambda;
    auto f = [&](double u) { return cplx(gi.f(u), 0) / (u + l2); };
    return -0.5 * quad::semi_infinite(f, 0.0, 1e-11);
}

// Weighted L2 norm over the plane of the radial vector field with the given
// profile: ||(1+|y|^2)^{-beta/2} profile(|y|) y-hat||.
inline double weighted_profile_norm(const std::function<cplx(double)>& profile, double beta,
                                    double s_max = 15.0) {
    auto f = [&](double s) {
        return std::pow(1 + s * s, -beta) * std::norm(profile(s)) * s;
    };
    const double acc = quad::panels(f, quad::uniform_breaks(0.0, s_max, 1.0));
    return std::sqrt(2 * pi * acc);
}

// Fitted decay exponent of ||<y>^{-beta} (g(i mu + 0) - g(0)) rho|| across a
// mu window above the threshold.
inline exponent_scan smoothed_difference_fit(const charge_model& c, double beta = 3.0,
                                             double mu_min = 1e-3, double mu_max = 1e-1,
                                             int samples = 13) {
    if (samples < 8) throw std::invalid_argument("smoothed_difference_fit: need >= 8 samples");
    exponent_scan out;
    const double step = std::log(mu_max / mu_min) / (samples - 1);
    for (int i = 0; i < samples; i++) {
        const double mu = mu_min * std::exp(i * step);
        out.x.push_back(mu);
        out.norm.push_back(weighted_profile_norm(
            [&](double s) { return smoothed_resolvent_difference(c, mu, s); }, beta));
    }
    out.fit = fit_power_law(out.x, out.norm, mu_min * 0.999, mu_max * 1.001);
    return out;
}

// ---------------------------------------------------------------------------
// High-frequency decay of the response building blocks along the imaginary
// axis: |kappa|, the response numerator, and the frequency response itself.
struct high_frequency_report {
    power_law_fit kappa, numerator, response;
};

inline high_frequency_report high_frequency_decay(const charge_model& c, double inertia,
                                                  const separable_data& d, double mu_min = 20,
                                                  double mu_max = 500, int samples = 25) {
    if (samples < 8) throw std::invalid_argument("high_frequency_decay: need >= 8 samples");
    std::vector<double> mus, ka, num, resp;
    const double step = std::log(mu_max / mu_min) / (samples - 1);
    for (int i = 0; i < samples; i++) {
        const double mu = mu_min * std::exp(i * step);
        mus.push_back(mu);
        ka.push_back(std::abs(kappa_line(c, mu)));
        num.push_back(std::abs(response_numerator_line(c, d, mu)));
        resp.push_back(std::abs(nu_tilde_line(c, inertia, d, mu)));
    }
    high_frequency_report r;
    r.kappa = fit_power_law(mus, ka, mu_min * 0.999, mu_max * 1.001);
    r.numerator = fit_power_law(mus, num, mu_min * 0.999, mu_max * 1.001);
    r.response = fit_power_law(mus, resp, mu_min * 0.999, mu_max * 1.001);
    return r;
}

}    // namespace mlspin
