// Rotating stationary states ("solitons") of the reduced field-particle
// system.  For rotation frequency omega the field equation Pi = 0,
// laplace A = omega J vrho has the solution A_hat = -omega (J vrho)_hat/|k|^2;
// the conserved angular momentum of that state is M = omega (I + kappa) where
// kappa is the coupling mass of the charge, and conversely the long-time
// frequency selected by a state of momentum M is omega = M / (I + kappa).

#pragma once

#include <cmath>
#include <memory>

#include "mlspin/charge.hpp"
#include "mlspin/grid.hpp"

namespace mlspin {

struct soliton {
    double omega = 0;       // rotation frequency
    double inertia = 1;     // particle moment of inertia
    double coupling = 0;    // lattice coupling mass kappa
    double moment = 0;      // angular momentum omega (inertia + coupling)
    double energy = 0;      // (omega^2/2)(inertia + coupling)
    vector_field a_hat;     // stationary vector potential, spectral
};

inline soliton build_soliton(std::shared_ptr<const spectral_grid> g, const charge_model& c,
                             double omega, double inertia) {
    if (!(inertia > 0)) throw std::invalid_argument("build_soliton: inertia must be positive");
    soliton s;
    s.omega = omega;
    s.inertia = inertia;
    s.coupling = coupling_mass_grid(g, c);
    s.moment = omega * (inertia + s.coupling);
    s.energy = omega * omega / 2 * (inertia + s.coupling);
    s.a_hat = spin_coupling_field(g, c);
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2 = g->k[m1] * g->k[m1] + g->k[m2] * g->k[m2];
            s.a_hat.c1.at(m1, m2) *= -omega / k2;
            s.a_hat.c2.at(m1, m2) *= -omega / k2;
        }
    return s;
}

// Frequency selected by angular momentum `moment` at coupling mass `kappa`.
inline double limit_frequency(double moment, double inertia, double kappa) {
    if (!(inertia + kappa > 0))
        throw std::invalid_argument("limit_frequency: inertia + kappa must be positive");
    return moment / (inertia + kappa);
}

}    // namespace mlspin
