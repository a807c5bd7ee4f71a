#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "mlspin/dynamics.hpp"
#include "mlspin/free_wave.hpp"
#include "mlspin/laplace.hpp"

using namespace mlspin;

namespace {

// Real, divergence-free pair built spectrally as i (J k) times Gaussian
// envelopes exp(-w |k|^2): a rotational derivative of a Gaussian bump, so the
// physical-space tails are Gaussian too (a k-hat polarization would leave a
// direction jump at k = 0 and power-law spatial tails).
field_pair gaussian_pair(std::shared_ptr<const spectral_grid> g, double ca, double cpi,
                         double wa = 0.25, double wp = 0.5) {
    field_pair z(g, rep::spectral);
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k1 = g->k[m1], k2 = g->k[m2];
            const double k2n = k1 * k1 + k2 * k2;
            const cplx amp(0, 1.0);    // i J k keeps the x-side real
            z.a.c1.at(m1, m2) = ca * std::exp(-wa * k2n) * amp * k2;
            z.a.c2.at(m1, m2) = -ca * std::exp(-wa * k2n) * amp * k1;
            z.pi.c1.at(m1, m2) = cpi * std::exp(-wp * k2n) * amp * k2;
            z.pi.c2.at(m1, m2) = -cpi * std::exp(-wp * k2n) * amp * k1;
        }
    return z;
}

double pair_max_diff(const field_pair& a, const field_pair& b) {
    double err = 0;
    for (auto [fa, fb] : {std::pair{&a.a.c1, &b.a.c1}, std::pair{&a.a.c2, &b.a.c2},
                          std::pair{&a.pi.c1, &b.pi.c1}, std::pair{&a.pi.c2, &b.pi.c2}})
        for (std::size_t i = 0; i < fa->v.size(); i++)
            err = std::max(err, std::abs(fa->v[i] - fb->v[i]));
    return err;
}

}    // namespace

TEST_CASE("spectral propagator group laws") {
    auto g = make_grid(96, 30.0);
    const field_pair z = gaussian_pair(g, 1.0, 0.7);
    wave_propagator wp(g);

    SECTION("zero time is the identity") {
        CHECK(pair_max_diff(wp.propagate(z, 0.0), z) == 0.0);
    }

    SECTION("energy is conserved") {
        // the conserved functional is the quadratic field energy; the triangle
        // norm ||grad A|| + ||Pi|| trades content between its two summands
        const double e0 = field_energy(z);
        for (double t : {1.0, 7.5, 31.0})
            CHECK(field_energy(wp.propagate(z, t)) == Catch::Approx(e0).epsilon(1e-12));
    }

    SECTION("composition matches the sum of times") {
        const field_pair two = wp.propagate(wp.propagate(z, 2.25), 3.5);
        const field_pair one = wp.propagate(z, 5.75);
        CHECK(pair_max_diff(two, one) < 1e-12);
    }

    SECTION("backward time inverts") {
        CHECK(pair_max_diff(wp.propagate(wp.propagate(z, 4.0), -4.0), z) < 1e-12);
    }

    SECTION("grid mismatch is rejected") {
        auto g2 = make_grid(64, 30.0);
        CHECK_THROWS_AS(wp.propagate(gaussian_pair(g2, 1, 1), 1.0), std::invalid_argument);
    }
}

TEST_CASE("retarded kernel values") {
    SECTION("pinned interior values") {
        CHECK(kernel_G(0, 0, 1) == Catch::Approx(1 / (2 * pi)).epsilon(1e-15));
        CHECK(kernel_G(0.3, 0.4, 1) == Catch::Approx(1 / (2 * pi * std::sqrt(0.75))));
        CHECK(kernel_G(0.3, 0.4, 2) == kernel_G(0.5, 0.0, 2));    // radial
    }

    SECTION("vanishes outside the light cone") {
        CHECK(kernel_G(1.0, 0.0, 1.0) == 0.0);
        CHECK(kernel_G(3.0, 4.0, 4.99) == 0.0);
    }

    SECTION("requires positive time") {
        CHECK_THROWS_AS(kernel_G(0, 0, 0), std::invalid_argument);
        CHECK_THROWS_AS(kernel_G(0, 0, -1), std::invalid_argument);
    }
}

TEST_CASE("kernel derivatives") {
    SECTION("match finite differences in the interior") {
        const double r = 0.8, t = 2.0, h = 1e-5;
        const auto d = kernel_G_derivatives(r, t);
        auto G = [](double rr, double tt) { return kernel_G(rr, 0, tt); };
        CHECK(d.gt == Catch::Approx((G(r, t + h) - G(r, t - h)) / (2 * h)).epsilon(1e-8));
        CHECK(d.gr == Catch::Approx((G(r + h, t) - G(r - h, t)) / (2 * h)).epsilon(1e-8));
        CHECK(d.gtt ==
              Catch::Approx((G(r, t + h) - 2 * G(r, t) + G(r, t - h)) / (h * h)).epsilon(1e-5));
        CHECK(d.grr ==
              Catch::Approx((G(r + h, t) - 2 * G(r, t) + G(r - h, t)) / (h * h)).epsilon(1e-5));
        const double mixed = (G(r + h, t + h) - G(r + h, t - h) - G(r - h, t + h) +
                              G(r - h, t - h)) /
                             (4 * h * h);
        CHECK(d.gtr == Catch::Approx(mixed).epsilon(1e-5));
    }

    SECTION("interior bounds scale like one over t squared") {
        // first derivatives times t^2 are constant along rays r = s t; second
        // derivatives times t^2 decay like 1/t
        auto scan = [](double t) {
            double top1 = 0, top2 = 0;
            for (double s = 0; s <= 0.5; s += 0.025) {
                const auto d = kernel_G_derivatives(s * t, t);
                top1 = std::max({top1, std::abs(d.gt), std::abs(d.gr)});
                top2 = std::max({top2, std::abs(d.gtt), std::abs(d.gtr), std::abs(d.grr)});
            }
            return std::pair{top1 * t * t, top2 * t * t};
        };
        const auto [b1_ref, b2_ref] = scan(1.0);
        for (double t : {2.0, 10.0, 60.0}) {
            const auto [b1, b2] = scan(t);
            CHECK(b1 <= b1_ref * 1.0001);
            CHECK(b2 <= b2_ref * 1.0001);
        }
    }

    SECTION("rejects the cone and beyond") {
        CHECK_THROWS_AS(kernel_G_derivatives(1.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(kernel_G_derivatives(2.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("kernel route matches the spectral route") {
    auto g = make_grid(64, 24.0);
    // sharp envelopes on both components so the support radius plus the travel
    // time t = 5 stays inside the box
    const field_pair z = gaussian_pair(g, 0.9, 1.1, 0.25, 0.25);

    SECTION("zero time is the identity") {
        CHECK(pair_max_diff(kernel_apply(z, 0.0), z) == 0.0);
    }

    SECTION("dual-path agreement at t = 5") {
        wave_propagator wp(g);
        const field_pair spectral = wp.propagate(z, 5.0);
        const field_pair kernel = kernel_apply(z, 5.0, 32, 64);
        field_pair diff = kernel;
        for (std::size_t i = 0; i < diff.a.c1.v.size(); i++) {
            diff.a.c1.v[i] -= spectral.a.c1.v[i];
            diff.a.c2.v[i] -= spectral.a.c2.v[i];
            diff.pi.c1.v[i] -= spectral.pi.c1.v[i];
            diff.pi.c2.v[i] -= spectral.pi.c2.v[i];
        }
        CHECK(energy_norm(diff) / energy_norm(spectral) < 1e-6);
    }

    SECTION("support violation is refused") {
        CHECK_THROWS_AS(kernel_apply(z, 10.0), std::domain_error);
    }

    SECTION("quadrature parameters are validated") {
        CHECK_THROWS_AS(kernel_apply(z, 1.0, 8, 64), std::invalid_argument);
    }
}

TEST_CASE("huygens principle on the grid") {
    auto g = make_grid(192, 30.0);
    field_pair z(g, rep::spectral);
    // sharp real bump exp(-2 r^2) in Pi only
    for (int m1 = 0; m1 < g->n; m1++)
        for (int m2 = 0; m2 < g->n; m2++) {
            const double k2n = g->k[m1] * g->k[m1] + g->k[m2] * g->k[m2];
            z.pi.c1.at(m1, m2) = std::exp(-k2n / 8) / 4;
        }
    const double r0 = support_radius(z);
    CHECK(r0 < 4.5);

    wave_propagator wp(g);
    field_pair out = wp.propagate(z, 4.0);
    out.to_physical();
    double inside = 0, outside = 0;
    for (int j1 = 0; j1 < g->n; j1++)
        for (int j2 = 0; j2 < g->n; j2++) {
            const double r = std::hypot(g->x[j1], g->x[j2]);
            const double v = std::abs(out.a.c1.at(j1, j2));
            if (r > r0 + 4.0 + 3 * g->h)
                outside = std::max(outside, v);
            else
                inside = std::max(inside, v);
        }
    CHECK(outside < 1e-10 * inside);
}

TEST_CASE("duhamel representation") {
    auto g = make_grid(96, 30.0);
    auto c = build_charge("reference");

    SECTION("zero forcing reduces to the free group") {
        const field_pair z = gaussian_pair(g, 1.0, 0.5);
        std::vector<double> nu(101, 0.0);
        const field_pair got = duhamel_solve(z, nu, 0.05, c, 5.0);
        wave_propagator wp(g);
        CHECK(pair_max_diff(got, wp.propagate(z, 5.0)) < 1e-12);
    }

    SECTION("reconstructs the coupled evolution") {
        const separable_data d{0.3, 1.0, 1.0, 1.0};
        sim_state s0;
        {
            const soliton sol = build_soliton(g, c, 0.4, 1.0);
            frame_state f{separable_state(g, c, d), 0.0};
            s0 = from_soliton_frame(f, sol, g, c);
        }
        evolution ev(s0, 0.01);
        const field_pair z0 = ev.offset();
        std::vector<double> nu{ev.nu()};
        const int steps = 1500;
        for (int n = 0; n < steps; n++) {
            ev.step();
            nu.push_back(ev.nu());
        }
        const field_pair direct = ev.offset();
        const field_pair via_duhamel = duhamel_solve(z0, nu, 0.01, c, 15.0);
        field_pair diff = via_duhamel;
        for (std::size_t i = 0; i < diff.a.c1.v.size(); i++) {
            diff.a.c1.v[i] -= direct.a.c1.v[i];
            diff.a.c2.v[i] -= direct.a.c2.v[i];
            diff.pi.c1.v[i] -= direct.pi.c1.v[i];
            diff.pi.c2.v[i] -= direct.pi.c2.v[i];
        }
        CHECK(energy_norm(diff) / energy_norm(direct) < 1e-4);
    }

    SECTION("input validation") {
        const field_pair z = gaussian_pair(g, 1.0, 0.5);
        std::vector<double> nu(3, 0.0);
        CHECK_THROWS_AS(duhamel_solve(z, nu, 0.05, c, 5.0), std::invalid_argument);
        CHECK_THROWS_AS(duhamel_solve(z, {0.0, 0.0}, 0.05, c, 0.05), std::invalid_argument);
        std::vector<double> coarse(11, 0.0);    // ds = 0.5 too wide for this grid
        CHECK_THROWS_AS(duhamel_solve(z, coarse, 0.5, c, 5.0), std::invalid_argument);
    }
}

TEST_CASE("scattering decomposition") {
    auto g = make_grid(64, 20.0);
    auto c = build_charge("reference");

    SECTION("unforced offset gives the free state itself and zero remainder") {
        const field_pair z = gaussian_pair(g, 0.8, 0.6);
        wave_propagator wp(g);
        scattering_input in;
        in.z0 = z;
        in.ds = 0.05;
        in.nu.assign(121, 0.0);
        in.snap_t = {2.0, 4.0};
        in.snap_z = {wp.propagate(z, 2.0), wp.propagate(z, 4.0)};
        const scattering_data sd = scattering_state(in, c);
        CHECK(pair_max_diff(sd.psi_plus, z) == 0.0);
        CHECK(sd.tail_rel == 0.0);
        REQUIRE(sd.r_norm.size() == 2);
        CHECK(sd.r_norm[0] < 1e-12);
        CHECK(sd.r_norm[1] < 1e-12);
    }

    SECTION("free flow conserves the field energy even past the box scale") {
        const field_pair z = gaussian_pair(g, 0.8, 0.6);
        wave_propagator wp(g);
        const double e0 = field_energy(z);
        CHECK(field_energy(wp.propagate(z, 17.0)) == Catch::Approx(e0).epsilon(1e-12));
    }

    SECTION("tail budget violation is refused") {
        scattering_input in;
        in.z0 = gaussian_pair(g, 0.8, 0.6);
        in.ds = 0.05;
        in.nu.assign(21, 0.1);    // non-decaying forcing
        const auto run = [&] { return scattering_state(in, c, 1e-6); };
        CHECK_THROWS_AS(run(), std::runtime_error);
    }
}
