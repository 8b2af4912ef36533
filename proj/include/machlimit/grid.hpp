#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "machlimit/errors.hpp"

namespace machlimit {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Highest derivative order supported by the spectral operators.  Fourth
// derivatives of marginally resolved fields are already noise-amplifying, so
// everything above is rejected rather than silently degraded.
inline constexpr int kMaxDerivativeOrder = 4;

// Uniform periodic grid on [0,2pi)^3 with the same even number of points per
// axis.  Wavenumbers per axis run through {-n/2+1, ..., n/2}.
class TorusGrid {
  public:
    TorusGrid() = default;

    explicit TorusGrid(int n_per_axis) : n_(n_per_axis) {
        if (n_ < 4 || n_ % 2 != 0)
            throw ValidationError("grid.n must be even and >= 4, got " + std::to_string(n_));
    }

    int n() const { return n_; }
    double dx() const { return kTwoPi / n_; }
    long points() const { return static_cast<long>(n_) * n_ * n_; }
    // r2c layout: last axis stores k3 = 0..n/2.
    long spectral_size() const { return static_cast<long>(n_) * n_ * (n_ / 2 + 1); }

    double coord(int i) const { return dx() * i; }

    // Signed wavenumber for a full-range index 0..n-1.
    int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

    // Two-thirds dealiasing cutoff: modes with any |k_j| > n/3 are dropped.
    int dealias_cutoff() const { return n_ / 3; }

    long index(int i1, int i2, int i3) const {
        return (static_cast<long>(i1) * n_ + i2) * n_ + i3;
    }

    bool operator==(const TorusGrid&) const = default;

  private:
    int n_ = 0;
};

// Derivative multi-index (a1,a2,a3) with |a| = a1+a2+a3.
struct MultiIndex {
    std::array<int, 3> a{0, 0, 0};

    MultiIndex() = default;
    MultiIndex(int a1, int a2, int a3) : a{a1, a2, a3} {
        if (a1 < 0 || a2 < 0 || a3 < 0)
            throw ValidationError("multi-index components must be non-negative");
    }

    int order() const { return a[0] + a[1] + a[2]; }
    int operator[](int j) const { return a[static_cast<size_t>(j)]; }
    bool operator==(const MultiIndex&) const = default;
};

// All multi-indices with |a| <= s, in lexicographic order.
inline std::vector<MultiIndex> multi_indices_up_to(int s) {
    if (s < 0) throw ValidationError("derivative order must be non-negative");
    std::vector<MultiIndex> out;
    for (int a1 = 0; a1 <= s; ++a1)
        for (int a2 = 0; a2 + a1 <= s; ++a2)
            for (int a3 = 0; a3 + a2 + a1 <= s; ++a3) out.emplace_back(a1, a2, a3);
    return out;
}

}  // namespace machlimit
