// Deterministic random streams for reproducible experiments.
//
// The engine is the standard 64-bit Mersenne twister.  The mappings from raw
// engine words to uniform and normal variates are spelled out here instead of
// delegated to the standard-library distributions, whose output sequences are
// implementation defined; identical seeds therefore reproduce identical
// variate streams on every toolchain.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mlspin {

class random_stream {
  public:
    explicit random_stream(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1): the top 53 bits of one engine word.
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal by the Box-Muller transform.  Consumes two engine words
    // per pair of variates; the second variate is cached and served next.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        const double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();    // log(0) guard
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0;
    bool have_spare_ = false;
};

}    // namespace mlspin
