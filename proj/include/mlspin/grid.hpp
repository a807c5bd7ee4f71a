// Periodic pseudo-spectral grid on the square [-L/2, L/2)^2.
//
// Unitary Fourier convention:  fhat(k) = (1/2pi) sum_j f(x_j) e^{-i k.x_j} h^2,
// inverted by f(x_j) = (1/2pi) sum_n fhat(k_n) e^{+i k.x_j} dk^2, so that the
// discrete Plancherel identity  sum |f|^2 h^2 = sum |fhat|^2 dk^2  is exact.
//
// The k-lattice is shifted by half a spacing, k_n = 2pi(n + 1/2)/L.  The shift
// removes the zero mode entirely: every multiplier 1/k^2 is well defined, the
// lattice is still symmetric under k -> -k (modes n and -n-1 pair up), and
// lattice sums of smooth rapidly decaying functions reproduce the plane
// integrals to machine precision, which keeps the small-k coupling mass that a
// lattice containing k = 0 would silently drop.

#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlspin {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

enum class rep { physical, spectral };

class spectral_grid {
  public:
    int n;        // modes per axis (even, >= 16)
    double box;   // side length L
    double h;     // x spacing L/n
    double dk;    // k spacing 2pi/L

    std::vector<double> x;    // x[j] = -L/2 + j h
    std::vector<double> k;    // per-axis k value in FFT storage order
    std::vector<cplx> xtw;    // e^{-i pi j / n} forward pre-twiddle

    spectral_grid(int n_, double box_) : n(n_), box(box_) {
        if (n < 16 || n % 2 != 0)
            throw std::invalid_argument("spectral_grid: n must be even and >= 16");
        if (!(box > 0))
            throw std::invalid_argument("spectral_grid: box length must be positive");
        h = box / n;
        dk = 2 * pi / box;
        x.resize(n);
        k.resize(n);
        xtw.resize(n);
        for (int j = 0; j < n; j++) {
            x[j] = -box / 2 + j * h;
            xtw[j] = std::polar(1.0, -pi * j / n);
        }
        for (int m = 0; m < n; m++) {
            int idx = (m < n / 2) ? m : m - n;    // signed mode number
            k[m] = dk * (idx + 0.5);
        }
        scratch_.resize(std::size_t(n) * n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch_.data());
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, flags);
        if (!fwd_ || !bwd_) throw std::runtime_error("spectral_grid: fftw plan failed");
    }

    ~spectral_grid() {
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
    }
    spectral_grid(const spectral_grid&) = delete;
    spectral_grid& operator=(const spectral_grid&) = delete;

    std::size_t size() const { return std::size_t(n) * n; }
    std::size_t idx(int i1, int i2) const { return std::size_t(i1) * n + i2; }

    // In-place x -> k transform of one scalar component.
    void to_spectral(cplx* v) const {
        const double scale = -(h * h) / (2 * pi);    // includes the (i)^2 axis factors
        for (int j1 = 0; j1 < n; j1++) {
            const cplx t1 = xtw[j1];
            cplx* row = v + std::size_t(j1) * n;
            for (int j2 = 0; j2 < n; j2++) row[j2] *= t1 * xtw[j2];
        }
        auto* p = reinterpret_cast<fftw_complex*>(v);
        fftw_execute_dft(fwd_, p, p);
        for (int m1 = 0; m1 < n; m1++) {
            cplx* row = v + std::size_t(m1) * n;
            for (int m2 = 0; m2 < n; m2++) {
                double s = ((m1 + m2) & 1) ? -scale : scale;
                row[m2] *= s;
            }
        }
    }

    // In-place k -> x transform of one scalar component.
    void to_physical(cplx* v) const {
        const double scale = -(dk * dk) / (2 * pi);
        for (int m1 = 0; m1 < n; m1++) {
            cplx* row = v + std::size_t(m1) * n;
            for (int m2 = 0; m2 < n; m2++) {
                double s = ((m1 + m2) & 1) ? -scale : scale;
                row[m2] *= s;
            }
        }
        auto* p = reinterpret_cast<fftw_complex*>(v);
        fftw_execute_dft(bwd_, p, p);
        for (int j1 = 0; j1 < n; j1++) {
            const cplx t1 = std::conj(xtw[j1]);
            cplx* row = v + std::size_t(j1) * n;
            for (int j2 = 0; j2 < n; j2++) row[j2] *= t1 * std::conj(xtw[j2]);
        }
    }

  private:
    mutable std::vector<cplx> scratch_;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

inline std::shared_ptr<spectral_grid> make_grid(int n, double box) {
    return std::make_shared<spectral_grid>(n, box);
}

// ---------------------------------------------------------------------------

class scalar_field {
  public:
    scalar_field() = default;
    scalar_field(std::shared_ptr<const spectral_grid> g, rep r) : grid_(std::move(g)), rep_(r) {
        v.assign(grid_->size(), cplx(0));
    }

    std::vector<cplx> v;

    const spectral_grid& grid() const { return *grid_; }
    std::shared_ptr<const spectral_grid> grid_ptr() const { return grid_; }
    rep representation() const { return rep_; }

    cplx& at(int i1, int i2) { return v[grid_->idx(i1, i2)]; }
    const cplx& at(int i1, int i2) const { return v[grid_->idx(i1, i2)]; }

    void to_spectral() {
        if (rep_ == rep::spectral) return;
        grid_->to_spectral(v.data());
        rep_ = rep::spectral;
    }
    void to_physical() {
        if (rep_ == rep::physical) return;
        grid_->to_physical(v.data());
        rep_ = rep::physical;
    }
    scalar_field as(rep r) const {
        scalar_field f = *this;
        if (r == rep::spectral) f.to_spectral(); else f.to_physical();
        return f;
    }

    // Largest imaginary residue of a field that should be real in x-space.
    double real_residual() const {
        if (rep_ != rep::physical)
            throw std::logic_error("real_residual: field not in physical representation");
        double m = 0;
        for (const cplx& z : v) m = std::max(m, std::abs(z.imag()));
        return m;
    }

  private:
    std::shared_ptr<const spectral_grid> grid_;
    rep rep_ = rep::physical;
};

struct vector_field {
    scalar_field c1, c2;

    vector_field() = default;
    vector_field(std::shared_ptr<const spectral_grid> g, rep r) : c1(g, r), c2(g, r) {}

    const spectral_grid& grid() const { return c1.grid(); }
    rep representation() const { return c1.representation(); }
    void to_spectral() { c1.to_spectral(); c2.to_spectral(); }
    void to_physical() { c1.to_physical(); c2.to_physical(); }
};

// State pair (A, Pi) (or soliton-frame (Lambda, Pi)).
struct field_pair {
    vector_field a;     // vector potential component
    vector_field pi;    // momentum component

    field_pair() = default;
    field_pair(std::shared_ptr<const spectral_grid> g, rep r) : a(g, r), pi(g, r) {}
    const spectral_grid& grid() const { return a.grid(); }
    void to_spectral() { a.to_spectral(); pi.to_spectral(); }
    void to_physical() { a.to_physical(); pi.to_physical(); }
};

// ---------------------------------------------------------------------------
// Pairings and norms.

namespace detail {
inline void check_compatible(const scalar_field& f, const scalar_field& g) {
    if (&f.grid() != &g.grid())
        throw std::invalid_argument("inner_product: fields live on different grids");
    if (f.representation() != g.representation())
        throw std::invalid_argument("inner_product: representation mismatch");
}
}    // namespace detail

// Real L2 pairing <f,g>; equals the Hermitian k-side pairing for real fields.
inline double inner_product(const scalar_field& f, const scalar_field& g) {
    detail::check_compatible(f, g);
    const auto& gr = f.grid();
    double w = (f.representation() == rep::physical) ? gr.h * gr.h : gr.dk * gr.dk;
    double s = 0;
    const std::size_t m = gr.size();
    for (std::size_t i = 0; i < m; i++) {
        const cplx &a = f.v[i], &b = g.v[i];
        s += a.real() * b.real() + a.imag() * b.imag();    // Re(a * conj b)
    }
    return s * w;
}

inline double inner_product(const vector_field& f, const vector_field& g) {
    return inner_product(f.c1, g.c1) + inner_product(f.c2, g.c2);
}

inline double l2_norm(const scalar_field& f) { return std::sqrt(inner_product(f, f)); }
inline double l2_norm(const vector_field& f) { return std::sqrt(inner_product(f, f)); }

// ---------------------------------------------------------------------------
// Spectral calculus.  All of these require (and check) spectral representation.

namespace detail {
inline void need_spectral(const scalar_field& f, const char* who) {
    if (f.representation() != rep::spectral)
        throw std::logic_error(std::string(who) + ": field must be in spectral representation");
}
}    // namespace detail

// d/dx_axis, axis = 1 or 2.
inline scalar_field derivative(const scalar_field& f, int axis) {
    detail::need_spectral(f, "derivative");
    scalar_field out = f;
    const auto& g = f.grid();
    for (int m1 = 0; m1 < g.n; m1++)
        for (int m2 = 0; m2 < g.n; m2++) {
            double kk = (axis == 1) ? g.k[m1] : g.k[m2];
            out.at(m1, m2) *= cplx(0, kk);
        }
    return out;
}

inline vector_field gradient(const scalar_field& f) {
    vector_field out;
    out.c1 = derivative(f, 1);
    out.c2 = derivative(f, 2);
    return out;
}

inline scalar_field divergence(const vector_field& f) {
    scalar_field out = derivative(f.c1, 1);
    const scalar_field d2 = derivative(f.c2, 2);
    for (std::size_t i = 0; i < out.v.size(); i++) out.v[i] += d2.v[i];
    return out;
}

// Scalar curl in 2d: d1 f2 - d2 f1.
inline scalar_field curl(const vector_field& f) {
    scalar_field out = derivative(f.c2, 1);
    const scalar_field d1 = derivative(f.c1, 2);
    for (std::size_t i = 0; i < out.v.size(); i++) out.v[i] -= d1.v[i];
    return out;
}

// Project onto divergence-free fields: fhat -> (1 - khat khat^T) fhat.
inline void helmholtz_project(vector_field& f) {
    detail::need_spectral(f.c1, "helmholtz_project");
    detail::need_spectral(f.c2, "helmholtz_project");
    const auto& g = f.grid();
    for (int m1 = 0; m1 < g.n; m1++) {
        const double k1 = g.k[m1];
        for (int m2 = 0; m2 < g.n; m2++) {
            const double k2 = g.k[m2];
            const double k2n = k1 * k1 + k2 * k2;
            cplx& a = f.c1.at(m1, m2);
            cplx& b = f.c2.at(m1, m2);
            const cplx kdotf = (k1 * a + k2 * b) / k2n;
            a -= k1 * kdotf;
            b -= k2 * kdotf;
        }
    }
}

// max_k |k . fhat| / max_k |fhat|, the divergence-free defect.
inline double divfree_defect(const vector_field& f) {
    detail::need_spectral(f.c1, "divfree_defect");
    const auto& g = f.grid();
    double top = 0, scale = 0;
    for (int m1 = 0; m1 < g.n; m1++)
        for (int m2 = 0; m2 < g.n; m2++) {
            const cplx a = f.c1.at(m1, m2), b = f.c2.at(m1, m2);
            top = std::max(top, std::abs(g.k[m1] * a + g.k[m2] * b));
            scale = std::max(scale, std::max(std::abs(a), std::abs(b)));
        }
    return (scale == 0) ? 0 : top / scale;
}

// ---------------------------------------------------------------------------
// Weighted norms.  <x>^beta weights are box-centered and applied in x-space.

enum class norm_variant {
    energy,           // ||<x>^b grad A|| + ||<x>^b Pi||
    energy_plus,      // energy + ||<x>^b A||
    weighted_l2,      // || <x>^b f ||           (per component, summed in square)
    weighted_sobolev  // || <x>^b <grad>^s f ||
};

struct weighted_norm_spec {
    double beta = 0;
    norm_variant variant = norm_variant::energy;
    double sobolev = 0;    // s for weighted_sobolev
};

namespace detail {
// sum_j <x_j>^{2 beta} |f(x_j)|^2 h^2 over already-physical samples.
inline double weighted_l2_sq(const scalar_field& fx, double beta) {
    const auto& g = fx.grid();
    double s = 0;
    for (int j1 = 0; j1 < g.n; j1++) {
        const double x1 = g.x[j1];
        for (int j2 = 0; j2 < g.n; j2++) {
            const double x2 = g.x[j2];
            const double w = std::pow(1 + x1 * x1 + x2 * x2, beta);
            s += w * std::norm(fx.at(j1, j2));
        }
    }
    return s * g.h * g.h;
}
}    // namespace detail

inline double weighted_l2_norm(const scalar_field& f, double beta) {
    scalar_field fx = f.as(rep::physical);
    return std::sqrt(detail::weighted_l2_sq(fx, beta));
}

inline double weighted_l2_norm(const vector_field& f, double beta) {
    return std::sqrt(detail::weighted_l2_sq(f.c1.as(rep::physical), beta) +
                     detail::weighted_l2_sq(f.c2.as(rep::physical), beta));
}

// || <x>^beta <grad>^s f ||_{L2}, <grad>^s = (1+|k|^2)^{s/2} applied spectrally.
inline double weighted_sobolev_norm(const scalar_field& f, double beta, double s) {
    scalar_field fk = f.as(rep::spectral);
    const auto& g = fk.grid();
    for (int m1 = 0; m1 < g.n; m1++)
        for (int m2 = 0; m2 < g.n; m2++) {
            double k2 = g.k[m1] * g.k[m1] + g.k[m2] * g.k[m2];
            fk.at(m1, m2) *= std::pow(1 + k2, s / 2);
        }
    fk.to_physical();
    return std::sqrt(detail::weighted_l2_sq(fk, beta));
}

// Energy-type norm of a state pair.
inline double weighted_norm(const field_pair& z, const weighted_norm_spec& spec) {
    switch (spec.variant) {
        case norm_variant::weighted_l2:
            return std::sqrt(std::pow(weighted_l2_norm(z.a, spec.beta), 2) +
                             std::pow(weighted_l2_norm(z.pi, spec.beta), 2));
        case norm_variant::weighted_sobolev: {
            double s2 = 0;
            for (const scalar_field* f : {&z.a.c1, &z.a.c2, &z.pi.c1, &z.pi.c2})
                s2 += std::pow(weighted_sobolev_norm(*f, spec.beta, spec.sobolev), 2);
            return std::sqrt(s2);
        }
        default: break;
    }
    vector_field ak = z.a;
    ak.to_spectral();
    double grad_sq = 0;
    for (const scalar_field* c : {&ak.c1, &ak.c2}) {
        grad_sq += detail::weighted_l2_sq(derivative(*c, 1).as(rep::physical), spec.beta);
        grad_sq += detail::weighted_l2_sq(derivative(*c, 2).as(rep::physical), spec.beta);
    }
    double out = std::sqrt(grad_sq) + weighted_l2_norm(z.pi, spec.beta);
    if (spec.variant == norm_variant::energy_plus) out += weighted_l2_norm(z.a, spec.beta);
    return out;
}

// Free-field energy (1/2)(||grad A||^2 + ||Pi||^2), the quadratic invariant
// of the free wave flow.  Distinct from energy_norm below, which is the
// triangle norm ||grad A|| + ||Pi|| and is not conserved (the flow exchanges
// content between the two summands).
inline double field_energy(const field_pair& z) {
    field_pair zk = z;
    zk.to_spectral();
    const auto& g = zk.grid();
    double grad_sq = 0, pi_sq = 0;
    for (int m1 = 0; m1 < g.n; m1++)
        for (int m2 = 0; m2 < g.n; m2++) {
            const double k2 = g.k[m1] * g.k[m1] + g.k[m2] * g.k[m2];
            grad_sq += k2 * (std::norm(zk.a.c1.at(m1, m2)) + std::norm(zk.a.c2.at(m1, m2)));
            pi_sq += std::norm(zk.pi.c1.at(m1, m2)) + std::norm(zk.pi.c2.at(m1, m2));
        }
    return 0.5 * (grad_sq + pi_sq) * g.dk * g.dk;
}

// Unweighted energy seminorm ||grad A|| + ||Pi|| evaluated in k-space.
inline double energy_norm(const field_pair& z) {
    field_pair zk = z;
    zk.to_spectral();
    const auto& g = zk.grid();
    double grad_sq = 0, pi_sq = 0;
    for (int m1 = 0; m1 < g.n; m1++)
        for (int m2 = 0; m2 < g.n; m2++) {
            const double k2 = g.k[m1] * g.k[m1] + g.k[m2] * g.k[m2];
            grad_sq += k2 * (std::norm(zk.a.c1.at(m1, m2)) + std::norm(zk.a.c2.at(m1, m2)));
            pi_sq += std::norm(zk.pi.c1.at(m1, m2)) + std::norm(zk.pi.c2.at(m1, m2));
        }
    const double w = g.dk * g.dk;
    return std::sqrt(grad_sq * w) + std::sqrt(pi_sq * w);
}

}    // namespace mlspin
