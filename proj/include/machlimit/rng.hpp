#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "machlimit/grid.hpp"

namespace machlimit {

// Seeded generator with hand-rolled uniform/normal draws so that streams are
// reproducible across standard libraries, not just across runs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    std::array<double, 3> unit_vector() {
        // Gaussian triple, normalized.
        while (true) {
            std::array<double, 3> v{normal(), normal(), normal()};
            const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            if (r > 1e-6) return {v[0] / r, v[1] / r, v[2] / r};
        }
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace machlimit
