// Rotationally equivariant charge distribution of the spinning particle.
//
// The scalar density rho is radial with Fourier transform rho_hat(k) =
// rho1(|k|); neutrality requires rho1(0) = 0.  The spin couples the field to
// the position-weighted density vrho(x) = x rho(x), whose transform is
// vrho_hat(k) = i rho1'(|k|) khat.  The rotated copy J vrho (J = rotation by
// -pi/2, J(v1,v2) = (v2,-v1)) is divergence free and is the only source term
// the reduced dynamics ever sees.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "mlspin/grid.hpp"
#include "mlspin/quadrature.hpp"

namespace mlspin {

struct charge_model {
    std::string profile;    // "reference" or "quartic"
    double scale = 1.0;

    // Radial k-space profile rho1 and its derivative.
    double rho1(double k) const {
        const double g = std::exp(-k * k);
        if (profile == "reference") return scale * k * k * g;
        return scale * k * k * k * k * g;    // quartic
    }
    double drho1(double k) const {
        const double g = std::exp(-k * k);
        if (profile == "reference") return scale * 2 * k * (1 - k * k) * g;
        return scale * 2 * k * k * k * (2 - k * k) * g;
    }
    double d2rho1(double k) const {
        const double g = std::exp(-k * k), u = k * k;
        if (profile == "reference") return scale * (2 - 10 * u + 4 * u * u) * g;
        return scale * u * (12 - 18 * u + 4 * u * u) * g;
    }
};

inline charge_model build_charge(const std::string& profile, double scale = 1.0) {
    if (profile != "reference" && profile != "quartic")
        throw std::invalid_argument("build_charge: unknown profile '" + profile + "'");
    if (!(scale > 0)) throw std::invalid_argument("build_charge: scale must be positive");
    charge_model c{profile, scale};
    if (std::abs(c.rho1(0.0)) > 1e-14)
        throw std::invalid_argument("build_charge: profile violates neutrality (rho1(0) != 0)");
    return c;
}

// rho_hat sampled on the grid (spectral representation, real valued).
inline scalar_field charge_density(std::shared_ptr<const spectral_grid> g, const charge_model& c) {
    scalar_field f(g, rep::spectral);
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double kk = std::hypot(g->k[m1], g->k[m2]);
            f.at(m1, m2) = c.rho1(kk);
        }
    return f;
}

// (J vrho)_hat = i rho1'(|k|) J khat, the divergence-free spin source.
inline vector_field spin_coupling_field(std::shared_ptr<const spectral_grid> g,
                                        const charge_model& c) {
    vector_field f(g, rep::spectral);
    for (int m1 = 0; m1 < g->n; m1++) {
        const double k1 = g->k[m1];
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2 = g->k[m2];
            const double kk = std::hypot(k1, k2);
            const cplx amp(0, c.drho1(kk) / kk);
            // J khat = (k2, -k1)/|k|
            f.c1.at(m1, m2) = amp * k2;
            f.c2.at(m1, m2) = -amp * k1;
        }
    }
    return f;
}

// vrho_hat = i rho1'(|k|) khat (the unrotated position-weighted density).
inline vector_field position_weighted_density(std::shared_ptr<const spectral_grid> g,
                                              const charge_model& c) {
    vector_field f(g, rep::spectral);
    for (int m1 = 0; m1 < g->n; m1++) {
        const double k1 = g->k[m1];
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2 = g->k[m2];
            const double kk = std::hypot(k1, k2);
            const cplx amp(0, c.drho1(kk) / kk);
            f.c1.at(m1, m2) = amp * k1;
            f.c2.at(m1, m2) = amp * k2;
        }
    }
    return f;
}

// Coulomb potential phi_hat = rho_hat / |k|^2 (well defined: the k-lattice
// avoids zero and rho1 vanishes quadratically).
inline scalar_field coulomb_potential(std::shared_ptr<const spectral_grid> g,
                                      const charge_model& c) {
    scalar_field f(g, rep::spectral);
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2 = g->k[m1] * g->k[m1] + g->k[m2] * g->k[m2];
            f.at(m1, m2) = c.rho1(std::sqrt(k2)) / k2;
        }
    return f;
}

// <A, J vrho>, the coupling that feeds back into the rotation frequency.
// Both fields must be spectral and share the grid.
inline double moment_pairing(const vector_field& a, const vector_field& jvrho) {
    detail::need_spectral(a.c1, "moment_pairing");
    detail::need_spectral(jvrho.c1, "moment_pairing");
    return inner_product(a, jvrho);
}

// Continuum coupling mass kappa_0 = int |vrho_hat|^2 / |k|^2 dk
//                                 = 2 pi int_0^inf rho1'(k)^2 / k dk.
inline double coupling_mass(const charge_model& c, double rel_tol = 1e-12) {
    auto f = [&](double k) {
        const double d = c.drho1(k);
        return d * d / k;
    };
    return 2 * pi * quad::semi_infinite(f, 0.0, rel_tol, 0.5);
}

// Same lattice sum the simulation sees: sum |vrho_hat|^2/|k|^2 dk^2.
inline double coupling_mass_grid(std::shared_ptr<const spectral_grid> g, const charge_model& c) {
    double s = 0;
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2 = g->k[m1] * g->k[m1] + g->k[m2] * g->k[m2];
            const double d = c.drho1(std::sqrt(k2));
            s += d * d / k2;
        }
    return s * g->dk * g->dk;
}

}    // namespace mlspin
