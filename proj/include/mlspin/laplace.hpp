// Frequency response of the linearized system on the Laplace side.
//
// Around a rotating stationary state the field offset Z = (Lambda, Pi) obeys
// the exactly linear system  dLambda/dt = Pi,  dPi/dt = laplace Lambda - nu J vrho
// with frequency offset nu(t) = <Lambda, J vrho>/I.  Taking Laplace transforms
// and eliminating the field gives the closed scalar formula
//
//   nu~(lambda) = <(lambda Lambda0 + Pi0)/(k^2+lambda^2), J vrho>
//                 / (I + kappa(lambda)),
//   kappa(lambda) = <J vrho/(k^2+lambda^2), J vrho>.
//
// Every pairing of a radial envelope against the spin source reduces to a 1d
// integral over u = |k|^2 with weight m(u) = rho1'(sqrt u)^2.  On the
// imaginary axis lambda = i mu + 0 the denominators u - mu^2 + i0 sgn(mu)
// split into a principal value and a delta contribution, which is what this
// header evaluates; nu(t) is then recovered by the inverse transform
//   nu(t) = (1/pi) Re int_0^inf e^{i mu t} nu~(i mu + 0) d mu.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mlspin/charge.hpp"
#include "mlspin/grid.hpp"
#include "mlspin/quadrature.hpp"
#include "mlspin/special_functions.hpp"

namespace mlspin {

// Radial spectral weight m(u) = rho1'(sqrt u)^2 and its u-derivative.
struct radial_density {
    charge_model c;
    double m(double u) const {
        const double d = c.drho1(std::sqrt(u));
        return d * d;
    }
    double dm(double u) const {
        const double k = std::sqrt(u);
        if (k < 1e-8) {
            const double d2 = c.d2rho1(0.0);
            return d2 * d2;
        }
        return c.drho1(k) * c.d2rho1(k) / k;
    }
};

// Principal value int_0^inf f(u)/(u-u0) du for smooth decaying f.  On the
// symmetric window [u0-w, u0+w] the constant f(u0) drops out and the
// difference quotient is regular (df supplies the on-point limit); outside
// the window the integrand is evaluated directly.
template <class F, class DF>
auto principal_value(F&& f, DF&& df, double u0, double rel_tol = 1e-11) {
    using R = std::invoke_result_t<F&, double>;
    if (!(u0 > 0)) throw std::invalid_argument("principal_value: u0 must be positive");
    const double w = std::min(u0, 1.0);
    const R f0 = f(u0);
    const R df0 = df(u0);
    auto reg = [&](double u) -> R {
        const double d = u - u0;
        if (std::abs(d) < 1e-9 * std::max(u0, 1.0)) return df0;
        return R((f(u) - f0) / d);
    };
    auto plain = [&](double u) -> R { return R(f(u) / (u - u0)); };
    R out = quad::adaptive(reg, u0 - w, u0 + w, rel_tol);
    if (u0 - w > 0) out += quad::adaptive(plain, 0.0, u0 - w, rel_tol);
    out += quad::semi_infinite(plain, u0 + w, rel_tol);
    return out;
}

// kappa(i mu + 0) = pi p.v. int m(u)/(u - mu^2) du - i pi^2 sgn(mu) m(mu^2).
inline cplx kappa_line(const charge_model& c, double mu) {
    const radial_density rd{c};
    if (mu == 0) return coupling_mass(c);
    const double u0 = mu * mu;
    auto f = [&](double u) { return rd.m(u); };
    auto df = [&](double u) { return rd.dm(u); };
    const double pv = principal_value(f, df, u0);
    const double sgn = (mu > 0) ? 1.0 : -1.0;
    return cplx(pi * pv, -pi * pi * sgn * rd.m(u0));
}

// Separable initial offsets: radial Gaussian envelopes riding on the spin
// source itself,  Lambda0_hat = a exp(-wl |k|^2) (J vrho)_hat,
//                 Pi0_hat     = b exp(-wp |k|^2) (J vrho)_hat.
struct separable_data {
    double a = 0.0;
    double width_lambda = 1.0;
    double b = 1.0;
    double width_pi = 1.0;
};

// The same data realized as grid fields (spectral representation).
inline field_pair separable_state(std::shared_ptr<const spectral_grid> g, const charge_model& c,
                                  const separable_data& d) {
    field_pair z(g, rep::spectral);
    const vector_field jv = spin_coupling_field(g, c);
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2 = g->k[m1] * g->k[m1] + g->k[m2] * g->k[m2];
            const double el = d.a * std::exp(-d.width_lambda * k2);
            const double ep = d.b * std::exp(-d.width_pi * k2);
            z.a.c1.at(m1, m2) = el * jv.c1.at(m1, m2);
            z.a.c2.at(m1, m2) = el * jv.c2.at(m1, m2);
            z.pi.c1.at(m1, m2) = ep * jv.c1.at(m1, m2);
            z.pi.c2.at(m1, m2) = ep * jv.c2.at(m1, m2);
        }
    return z;
}

// <(lambda Lambda0 + Pi0)/(k^2+lambda^2), J vrho> at lambda = i mu + 0.
inline cplx response_numerator_line(const charge_model& c, const separable_data& d, double mu) {
    const radial_density rd{c};
    if (mu == 0) {
        // m(u)/u is regular at 0 for a neutral charge
        auto h = [&](double u) { return d.b * std::exp(-d.width_pi * u) * rd.m(u) / u; };
        return pi * quad::semi_infinite(h, 0.0, 1e-11);
    }
    auto env = [&](double u) -> cplx {
        return cplx(0, mu) * d.a * std::exp(-d.width_lambda * u) +
               d.b * std::exp(-d.width_pi * u);
    };
    auto denv = [&](double u) -> cplx {
        return cplx(0, mu) * d.a * (-d.width_lambda) * std::exp(-d.width_lambda * u) +
               d.b * (-d.width_pi) * std::exp(-d.width_pi * u);
    };
    auto g = [&](double u) -> cplx { return env(u) * rd.m(u); };
    auto dg = [&](double u) -> cplx { return env(u) * rd.dm(u) + denv(u) * rd.m(u); };
    const double u0 = mu * mu;
    const cplx pv = principal_value(g, dg, u0);
    const double sgn = (mu > 0) ? 1.0 : -1.0;
    return pi * pv - cplx(0, pi * pi * sgn) * g(u0);
}

inline cplx nu_tilde_line(const charge_model& c, double inertia, const separable_data& d,
                          double mu) {
    return response_numerator_line(c, d, mu) / (inertia + kappa_line(c, mu));
}

// Minimum of |I + kappa(i mu + 0)| over a frequency scan: a small margin
// signals a quasi-resonance that would invalidate the inversion.
struct nondegeneracy {
    double margin = 0;
    double argmin_mu = 0;
    bool ok() const { return margin > 1e-6; }
};

inline nondegeneracy check_nondegeneracy(const charge_model& c, double inertia,
                                         double mu_max = 12.0, int samples = 400) {
    if (samples < 2) throw std::invalid_argument("check_nondegeneracy: need samples >= 2");
    nondegeneracy out;
    out.margin = 1e300;
    for (int i = 0; i <= samples; i++) {
        const double mu = mu_max * i / samples;
        const double v = std::abs(inertia + kappa_line(c, mu));
        if (v < out.margin) {
            out.margin = v;
            out.argmin_mu = mu;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inverse transform nu(t) = (1/pi) Re int_0^inf e^{i mu t} nu~(i mu+0) d mu.
//
// Gauss-Legendre panels: geometrically refined towards mu = 0 (where nu~ has
// mild log-type kinks) and uniform width further out.  The truncated tail
// mu > mu_max is restored from the analytic asymptotic model
//   nu~(i mu) ~ p/mu + q/mu^2 + r/mu^3
// whose coefficients follow from moments of the radial weight (a fitted model
// would be ill-conditioned on the narrow window near mu_max, and coefficient
// noise there leaks O(0.01) artifacts into nu(t) at late times); the
// oscillatory tail integrals reduce to Si/Ci.

class nu_inversion {
  public:
    nu_inversion(const charge_model& c, double inertia, const separable_data& d,
                 double mu_max = 200.0, double panel_width = 0.25) : mu_max_(mu_max) {
        if (!(mu_max > 2) || !(panel_width > 0) || panel_width > mu_max / 4)
            throw std::invalid_argument("nu_inversion: bad mu grid parameters");
        std::vector<double> brk = quad::geometric_breaks(0.0, panel_width, 1e-6 * panel_width);
        for (double b = brk.back(); b + panel_width < mu_max + 1e-12; b += panel_width)
            brk.push_back(b + panel_width);
        if (brk.back() < mu_max) brk.push_back(mu_max);
        for (std::size_t p = 0; p + 1 < brk.size(); p++) {
            const double cc = (brk[p] + brk[p + 1]) / 2, rr = (brk[p + 1] - brk[p]) / 2;
            for (int i = 0; i < 8; i++) {
                for (double sgn : {-1.0, 1.0}) {
                    nodes_.push_back(cc + sgn * rr * quad::gl16_x[i]);
                    weights_.push_back(rr * quad::gl16_w[i]);
                }
            }
        }
        values_.reserve(nodes_.size());
        for (double mu : nodes_) values_.push_back(nu_tilde_line(c, inertia, d, mu));
        tail_moments(c, inertia, d);
    }

    double mu_max() const { return mu_max_; }
    std::size_t node_count() const { return nodes_.size(); }

    double operator()(double t) const {
        if (t < 0) throw std::invalid_argument("nu_inversion: t must be nonnegative");
        double acc = 0;
        for (std::size_t i = 0; i < nodes_.size(); i++)
            acc += weights_[i] * (values_[i] * std::polar(1.0, nodes_[i] * t)).real();
        acc += tail(t);
        return acc / pi;
    }

    std::vector<double> operator()(const std::vector<double>& ts) const {
        std::vector<double> out;
        out.reserve(ts.size());
        for (double t : ts) out.push_back((*this)(t));
        return out;
    }

  private:
    void tail_moments(const charge_model& c, double inertia, const separable_data& d) {
        // For mu^2 far beyond the support of m, the principal-value integrals
        // expand as p.v. int f/(u - mu^2) du = -sum_j M_j(f) mu^{-2j-2} with
        // moments M_j(f) = int u^j f(u) du (delta terms exponentially small).
        // Applying this to the numerator envelope (i mu a e^{-wl u} + b
        // e^{-wp u}) m(u) and to kappa, then expanding 1/(I + kappa), gives
        //   nu~ ~ -(pi/I) [ i a A0 / mu + b B0 / mu^2
        //                   + i a (A1 + pi A0 S0 / I) / mu^3 ].
        const radial_density rd{c};
        auto moment = [&](double width, int pow) {
            auto f = [&](double u) {
                double up = 1.0;
                for (int j = 0; j < pow; j++) up *= u;
                return up * std::exp(-width * u) * rd.m(u);
            };
            return quad::semi_infinite(f, 0.0, 1e-12);
        };
        const double s0 = moment(0.0, 0);
        const double a0 = moment(d.width_lambda, 0);
        const double a1 = moment(d.width_lambda, 1);
        const double b0 = moment(d.width_pi, 0);
        tail_p_ = cplx(0, -pi * d.a * a0 / inertia);
        tail_q_ = cplx(-pi * d.b * b0 / inertia, 0);
        tail_r_ = cplx(0, -pi * d.a * (a1 + pi * a0 * s0 / inertia) / inertia);
    }

    double tail(double t) const {
        const double tt = std::max(t, 1e-12);
        const double x = mu_max_ * tt;
        double si, ci;
        sf::sine_cosine_integrals(x, si, ci);
        const cplx i1(-ci, pi / 2 - si);
        const cplx eix = std::polar(1.0, x);
        const cplx it(0, tt);
        const cplx i2 = it * i1 + eix / mu_max_;
        const cplx i3 = (it * i2 + eix / (mu_max_ * mu_max_)) / 2.0;
        return (tail_p_ * i1 + tail_q_ * i2 + tail_r_ * i3).real();
    }

    double mu_max_;
    std::vector<double> nodes_, weights_;
    std::vector<cplx> values_;
    cplx tail_p_{}, tail_q_{}, tail_r_{};
};

}    // namespace mlspin
