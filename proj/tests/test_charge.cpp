#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mlspin/charge.hpp"

using namespace mlspin;

// The reference profile rho1(k) = k^2 exp(-k^2) corresponds in x-space to
// rho(x) = (1/2)(1 - r^2/4) exp(-r^2/4) with Coulomb potential
// phi(x) = (1/2) exp(-r^2/4); both follow from the Gaussian transform pair
// under the symmetric 1/(2pi) convention.

TEST_CASE("charge construction guards") {
    CHECK_THROWS_AS(build_charge("triangular"), std::invalid_argument);
    CHECK_THROWS_AS(build_charge("reference", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_charge("reference", -2.0), std::invalid_argument);
    CHECK(build_charge("reference").rho1(1.0) == Catch::Approx(std::exp(-1.0)));
    CHECK(build_charge("quartic", 2.0).rho1(1.0) == Catch::Approx(2 * std::exp(-1.0)));
}

TEST_CASE("radial profile derivatives are consistent") {
    for (const char* name : {"reference", "quartic"}) {
        INFO("profile " << name);
        auto c = build_charge(name, 1.3);
        for (double k : {0.05, 0.7, 1.0, 2.4}) {
            INFO("k = " << k);
            const double h = 1e-5;
            const double d1 = (c.rho1(k + h) - c.rho1(k - h)) / (2 * h);
            CHECK(c.drho1(k) == Catch::Approx(d1).margin(1e-8));
            const double d2 = (c.drho1(k + h) - c.drho1(k - h)) / (2 * h);
            CHECK(c.d2rho1(k) == Catch::Approx(d2).margin(1e-8));
        }
    }
}

TEST_CASE("charge density in physical space") {
    auto g = make_grid(128, 30.0);
    auto c = build_charge("reference");
    scalar_field rho = charge_density(g, c);
    rho.to_physical();
    CHECK(rho.real_residual() < 1e-12);

    double err = 0;
    for (int j1 = 0; j1 < g->n; j1++)
        for (int j2 = 0; j2 < g->n; j2++) {
            const double r2 = g->x[j1] * g->x[j1] + g->x[j2] * g->x[j2];
            const double want = 0.5 * (1 - r2 / 4) * std::exp(-r2 / 4);
            err = std::max(err, std::abs(rho.at(j1, j2) - want));
        }
    CHECK(err < 1e-12);

    // neutrality: total charge vanishes
    cplx total = 0;
    for (const cplx& z : rho.v) total += z;
    CHECK(std::abs(total) * g->h * g->h < 1e-12);
}

TEST_CASE("coulomb potential solves the Poisson equation") {
    auto g = make_grid(128, 30.0);
    auto c = build_charge("reference");
    scalar_field phi = coulomb_potential(g, c);

    SECTION("spectral closed form") {
        double err = 0;
        for (int m1 : {0, 17, 80})
            for (int m2 : {3, 64}) {
                const double k2 = g->k[m1] * g->k[m1] + g->k[m2] * g->k[m2];
                err = std::max(err, std::abs(phi.at(m1, m2) - std::exp(-k2)));
            }
        CHECK(err < 1e-13);
    }

    SECTION("physical closed form") {
        scalar_field px = phi.as(rep::physical);
        double err = 0;
        for (int j1 = 0; j1 < g->n; j1++)
            for (int j2 = 0; j2 < g->n; j2++) {
                const double r2 = g->x[j1] * g->x[j1] + g->x[j2] * g->x[j2];
                err = std::max(err, std::abs(px.at(j1, j2) - 0.5 * std::exp(-r2 / 4)));
            }
        CHECK(err < 1e-12);
    }

    SECTION("minus laplacian of phi reproduces rho") {
        scalar_field lap = derivative(derivative(phi, 1), 1);
        scalar_field l2 = derivative(derivative(phi, 2), 2);
        scalar_field rho = charge_density(g, c);
        double err = 0;
        for (std::size_t i = 0; i < lap.v.size(); i++)
            err = std::max(err, std::abs(lap.v[i] + l2.v[i] + rho.v[i]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("position-weighted density fields") {
    auto g = make_grid(128, 30.0);
    auto c = build_charge("reference");

    vector_field jv = spin_coupling_field(g, c);
    CHECK(divfree_defect(jv) < 1e-13);

    vector_field vr = position_weighted_density(g, c);
    scalar_field rot = curl(vr);
    CHECK(l2_norm(rot) < 1e-12);

    SECTION("x-space forms x rho and J(x rho)") {
        vector_field jvx = jv, vrx = vr;
        jvx.to_physical();
        vrx.to_physical();
        double err = 0;
        for (int j1 = 0; j1 < g->n; j1++)
            for (int j2 = 0; j2 < g->n; j2++) {
                const double x1 = g->x[j1], x2 = g->x[j2];
                const double rho = 0.5 * (1 - (x1 * x1 + x2 * x2) / 4) *
                                   std::exp(-(x1 * x1 + x2 * x2) / 4);
                err = std::max(err, std::abs(vrx.c1.at(j1, j2) - x1 * rho));
                err = std::max(err, std::abs(vrx.c2.at(j1, j2) - x2 * rho));
                err = std::max(err, std::abs(jvx.c1.at(j1, j2) - x2 * rho));
                err = std::max(err, std::abs(jvx.c2.at(j1, j2) + x1 * rho));
            }
        CHECK(err < 1e-11);
    }

    SECTION("pairing requires spectral fields") {
        vector_field ax = jv;
        ax.to_physical();
        CHECK_THROWS_AS(moment_pairing(ax, jv), std::logic_error);
    }
}

TEST_CASE("coupling mass") {
    SECTION("continuum quadrature equals pi for both unit profiles") {
        CHECK(coupling_mass(build_charge("reference")) == Catch::Approx(pi).epsilon(1e-11));
        CHECK(coupling_mass(build_charge("quartic")) == Catch::Approx(pi).epsilon(1e-11));
    }
    SECTION("scales quadratically with the charge scale") {
        CHECK(coupling_mass(build_charge("reference", 1.5)) ==
              Catch::Approx(2.25 * pi).epsilon(1e-11));
    }
    SECTION("lattice sum agrees with the continuum value") {
        auto g = make_grid(256, 60.0);
        CHECK(coupling_mass_grid(g, build_charge("reference")) ==
              Catch::Approx(pi).epsilon(1e-12));
        CHECK(coupling_mass_grid(g, build_charge("quartic")) ==
              Catch::Approx(pi).epsilon(1e-12));
    }
}
