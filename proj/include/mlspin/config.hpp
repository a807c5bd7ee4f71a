// Experiment configuration: INI-style key-value text, a typed configuration
// with a documented desk-scale default profile, validation (including the
// wave wrap-around refusal), and a stable hash tying outputs to their inputs.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mlspin/charge.hpp"

namespace mlspin {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}    // namespace detail

// Parsed "[section] / key = value" text.  Lines starting with '#' or ';' are
// comments; a trailing comment must be separated from the value by blanks.
// Duplicate keys are rejected rather than silently overridden.
class settings_text {
  public:
    static settings_text parse(const std::string& text) {
        settings_text out;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            lineno++;
            std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t[0] == '[') {
                const auto close = t.find(']');
                if (close == std::string::npos || close != t.size() - 1)
                    fail(lineno, "malformed section header");
                section = detail::trim(t.substr(1, close - 1));
                if (section.empty()) fail(lineno, "empty section name");
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) fail(lineno, "expected key = value");
            const std::string key = detail::trim(t.substr(0, eq));
            std::string val = detail::trim(t.substr(eq + 1));
            for (const char c : {'#', ';'}) {
                const auto cut = val.find(std::string(" ") + c);
                if (cut != std::string::npos) val = detail::trim(val.substr(0, cut));
            }
            if (key.empty()) fail(lineno, "empty key");
            if (val.empty()) fail(lineno, "empty value");
            const std::string full = section.empty() ? key : section + "." + key;
            if (!out.kv_.emplace(full, val).second) fail(lineno, "duplicate key '" + full + "'");
        }
        return out;
    }

    static settings_text load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str());
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    // Typed accessors mark the key as consumed so that unknown keys can be
    // reported after the schema walk.
    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        seen_.insert(key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        seen_.insert(key);
        char* end = nullptr;
        const double v = std::strtod(it->second.c_str(), &end);
        if (end == it->second.c_str() || *end != '\0')
            throw std::invalid_argument("config: '" + key + "' is not a number: " + it->second);
        return v;
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        seen_.insert(key);
        char* end = nullptr;
        const long long v = std::strtoll(it->second.c_str(), &end, 10);
        if (end == it->second.c_str() || *end != '\0')
            throw std::invalid_argument("config: '" + key + "' is not an integer: " + it->second);
        return v;
    }

    void reject_unknown() const {
        for (const auto& [key, val] : kv_)
            if (!seen_.count(key))
                throw std::invalid_argument("config: unknown setting '" + key + "'");
    }

  private:
    [[noreturn]] static void fail(int lineno, const std::string& what) {
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + what);
    }

    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> seen_;
};

// Radius beyond which the physical-space factor of a Gaussian spectral
// envelope e^{-width k^2} has fallen below 1e-12 of its peak.
inline double gaussian_support_radius(double width) {
    return 2 * std::sqrt(27.7 * std::max(width, 0.0));
}

// Physical radius containing the built-in charge bumps to 1e-12 of peak; both
// profiles share the e^{-k^2} envelope, hence the e^{-r^2/4} physical decay.
inline constexpr double charge_support_radius = 13.0;

struct experiment_config {
    // charge
    std::string charge_profile = "reference";
    double charge_scale = 1.0;
    // model constants; the default angular momentum makes the limit frequency
    // M/(I + pi) exactly one for the reference charge
    double inertia = 1.0;
    double momentum = 1.0 + pi;
    // grid and time stepping
    int modes = 512;
    double box = 160.0;
    double dt = 0.01;
    double t_max = 40.0;
    double sample_dt = 0.25;
    // separable divergence-free perturbation: spin-coupling direction times
    // radial Gaussian envelopes, potential sector a, momentum sector b
    double data_a = 0.0;
    double width_lambda = 1.0;
    double data_b = 1.0;
    double width_pi = 1.0;
    double amplitude = 0.1;
    double noise = 0.0;    // seeded random extra perturbation amplitude
    std::uint64_t seed = 1;
    // attraction/scattering fits
    double beta_attract = 3.0;
    double fit_lo = 10.0;
    double fit_hi = 40.0;
    // scattering comparison: cadence of the stored field snapshots and the
    // admissible relative size of the neglected Duhamel tail beyond t_max
    double scatter_snap_dt = 2.5;
    double scatter_tail_budget = 0.05;
    // free-wave experiment
    double beta_freewave = 2.5;
    double freewave_width = 0.25;
    double freewave_t_max = 60.0;
    double freewave_fit_lo = 10.0;
    double freewave_fit_hi = 60.0;
    // frequency-response inversion
    double mu_max = 60.0;
    double mu_spacing = 0.5;
    // threshold-resolvent probe
    double res_beta = 3.0;
    double res_radius = 40.0;
    double res_panel = 2.0;
    double zeta_lo = 1e-3;
    double zeta_hi = 1e-1;
    int zeta_samples = 17;
    // output
    std::string out_dir = "out";

    static experiment_config from(const settings_text& s) {
        experiment_config c;
        c.charge_profile = s.get_string("charge.profile", c.charge_profile);
        c.charge_scale = s.get_double("charge.scale", c.charge_scale);
        c.inertia = s.get_double("model.inertia", c.inertia);
        c.momentum = s.get_double("model.momentum", c.momentum);
        c.modes = int(s.get_int("grid.modes", c.modes));
        c.box = s.get_double("grid.box", c.box);
        c.dt = s.get_double("time.dt", c.dt);
        c.t_max = s.get_double("time.t_max", c.t_max);
        c.sample_dt = s.get_double("time.sample_dt", c.sample_dt);
        c.data_a = s.get_double("data.a", c.data_a);
        c.width_lambda = s.get_double("data.width_lambda", c.width_lambda);
        c.data_b = s.get_double("data.b", c.data_b);
        c.width_pi = s.get_double("data.width_pi", c.width_pi);
        c.amplitude = s.get_double("data.amplitude", c.amplitude);
        c.noise = s.get_double("data.noise", c.noise);
        c.seed = std::uint64_t(s.get_int("data.seed", (long long)(c.seed)));
        c.beta_attract = s.get_double("fits.beta_attract", c.beta_attract);
        c.fit_lo = s.get_double("fits.window_lo", c.fit_lo);
        c.fit_hi = s.get_double("fits.window_hi", c.fit_hi);
        c.scatter_snap_dt = s.get_double("scatter.snap_dt", c.scatter_snap_dt);
        c.scatter_tail_budget = s.get_double("scatter.tail_budget", c.scatter_tail_budget);
        c.beta_freewave = s.get_double("freewave.beta", c.beta_freewave);
        c.freewave_width = s.get_double("freewave.width", c.freewave_width);
        c.freewave_t_max = s.get_double("freewave.t_max", c.freewave_t_max);
        c.freewave_fit_lo = s.get_double("freewave.window_lo", c.freewave_fit_lo);
        c.freewave_fit_hi = s.get_double("freewave.window_hi", c.freewave_fit_hi);
        c.mu_max = s.get_double("laplace.mu_max", c.mu_max);
        c.mu_spacing = s.get_double("laplace.mu_spacing", c.mu_spacing);
        c.res_beta = s.get_double("resolvent.beta", c.res_beta);
        c.res_radius = s.get_double("resolvent.radius", c.res_radius);
        c.res_panel = s.get_double("resolvent.panel", c.res_panel);
        c.zeta_lo = s.get_double("resolvent.zeta_lo", c.zeta_lo);
        c.zeta_hi = s.get_double("resolvent.zeta_hi", c.zeta_hi);
        c.zeta_samples = int(s.get_int("resolvent.zeta_samples", c.zeta_samples));
        c.out_dir = s.get_string("output.dir", c.out_dir);
        s.reject_unknown();
        c.validate();
        return c;
    }

    // Physical radius of the initial perturbation: the spin-coupling bump
    // convolved with the widest Gaussian envelope in use.
    double data_radius() const {
        double w = 0.0;
        if (data_a != 0.0) w = std::max(w, width_lambda);
        if (data_b != 0.0 || noise != 0.0) w = std::max(w, width_pi);
        return charge_support_radius + gaussian_support_radius(w);
    }

    void validate() const {
        build_charge(charge_profile, charge_scale);    // admissibility
        require(inertia > 0, "model.inertia must be positive");
        require(modes >= 16 && modes % 2 == 0, "grid.modes must be even and >= 16");
        require(box > 0, "grid.box must be positive");
        require(dt > 0, "time.dt must be positive");
        require(t_max > dt, "time.t_max must exceed time.dt");
        require(sample_dt >= dt, "time.sample_dt must be >= time.dt");
        require(amplitude >= 0 && noise >= 0, "data amplitudes must be >= 0");
        require(width_lambda > 0 && width_pi > 0 && freewave_width > 0,
                "envelope widths must be positive");
        require(beta_attract > 2.5, "fits.beta_attract must exceed 5/2");
        require(beta_freewave > 2.0, "freewave.beta must exceed 2");
        require(fit_lo > 0 && fit_hi > fit_lo, "fits window must be ordered and positive");
        require(fit_hi <= t_max, "fits.window_hi must not exceed time.t_max");
        require(scatter_snap_dt >= dt, "scatter.snap_dt must be >= time.dt");
        require(scatter_tail_budget > 0, "scatter.tail_budget must be positive");
        require(freewave_fit_lo > 0 && freewave_fit_hi > freewave_fit_lo,
                "freewave window must be ordered and positive");
        require(freewave_fit_hi <= freewave_t_max,
                "freewave.window_hi must not exceed freewave.t_max");
        require(mu_max >= 10, "laplace.mu_max must be >= 10");
        require(mu_spacing > 0 && mu_spacing <= 1, "laplace.mu_spacing must lie in (0, 1]");
        require(res_beta > 0 && res_radius > 1 && res_panel > 0,
                "resolvent probe parameters out of range");
        require(zeta_lo > 0 && zeta_hi > zeta_lo, "resolvent zeta window must be ordered");
        require(zeta_samples >= 8, "resolvent.zeta_samples must be >= 8");
        require(!out_dir.empty(), "output.dir must not be empty");

        // refuse runs long enough for wrapped wave fronts to contaminate the
        // weighted-norm observation region
        const double margin = box / 2 - data_radius() - charge_support_radius;
        if (!(t_max < margin))
            throw std::invalid_argument(
                "config: wrap-around violation: time.t_max = " + std::to_string(t_max) +
                " must stay below box/2 - data radius - charge radius = " +
                std::to_string(margin));
        const double fw_margin =
            box / 2 - gaussian_support_radius(freewave_width) - charge_support_radius;
        if (!(freewave_t_max < fw_margin))
            throw std::invalid_argument(
                "config: wrap-around violation: freewave.t_max = " +
                std::to_string(freewave_t_max) + " must stay below " +
                std::to_string(fw_margin));
    }

    // Canonical serialization: every knob in a fixed order, full precision.
    std::string canonical() const {
        std::ostringstream o;
        o.precision(17);
        o << "charge.profile=" << charge_profile << "\ncharge.scale=" << charge_scale
          << "\nmodel.inertia=" << inertia << "\nmodel.momentum=" << momentum
          << "\ngrid.modes=" << modes << "\ngrid.box=" << box << "\ntime.dt=" << dt
          << "\ntime.t_max=" << t_max << "\ntime.sample_dt=" << sample_dt
          << "\ndata.a=" << data_a << "\ndata.width_lambda=" << width_lambda
          << "\ndata.b=" << data_b << "\ndata.width_pi=" << width_pi
          << "\ndata.amplitude=" << amplitude << "\ndata.noise=" << noise
          << "\ndata.seed=" << seed << "\nfits.beta_attract=" << beta_attract
          << "\nfits.window_lo=" << fit_lo << "\nfits.window_hi=" << fit_hi
          << "\nscatter.snap_dt=" << scatter_snap_dt
          << "\nscatter.tail_budget=" << scatter_tail_budget
          << "\nfreewave.beta=" << beta_freewave << "\nfreewave.width=" << freewave_width
          << "\nfreewave.t_max=" << freewave_t_max << "\nfreewave.window_lo=" << freewave_fit_lo
          << "\nfreewave.window_hi=" << freewave_fit_hi << "\nlaplace.mu_max=" << mu_max
          << "\nlaplace.mu_spacing=" << mu_spacing << "\nresolvent.beta=" << res_beta
          << "\nresolvent.radius=" << res_radius << "\nresolvent.panel=" << res_panel
          << "\nresolvent.zeta_lo=" << zeta_lo << "\nresolvent.zeta_hi=" << zeta_hi
          << "\nresolvent.zeta_samples=" << zeta_samples << "\n";
        return o.str();
    }

    // FNV-1a over the canonical serialization (the output directory is
    // excluded above: moving results must not change their identity).
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const unsigned char c : canonical()) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

  private:
    static void require(bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument("config: " + what);
    }
};

}    // namespace mlspin
