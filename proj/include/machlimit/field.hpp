#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "machlimit/grid.hpp"

namespace machlimit {

// Real scalar field sampled on a TorusGrid, row-major (i1,i2,i3).
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const TorusGrid& grid, double fill = 0.0)
        : grid_(grid), v_(static_cast<size_t>(grid.points()), fill) {}

    static ScalarField from_function(const TorusGrid& grid,
                                     const std::function<double(double, double, double)>& f) {
        ScalarField out(grid);
        const int n = grid.n();
        long idx = 0;
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int i3 = 0; i3 < n; ++i3)
                    out.v_[idx++] = f(grid.coord(i1), grid.coord(i2), grid.coord(i3));
        return out;
    }

    const TorusGrid& grid() const { return grid_; }
    long size() const { return static_cast<long>(v_.size()); }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double& operator[](long i) { return v_[static_cast<size_t>(i)]; }
    double operator[](long i) const { return v_[static_cast<size_t>(i)]; }
    double& at(int i1, int i2, int i3) { return v_[static_cast<size_t>(grid_.index(i1, i2, i3))]; }
    double at(int i1, int i2, int i3) const { return v_[static_cast<size_t>(grid_.index(i1, i2, i3))]; }

    ScalarField& operator+=(const ScalarField& o) {
        check_same_grid(o);
        for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        check_same_grid(o);
        for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    ScalarField& operator*=(double c) {
        for (double& x : v_) x *= c;
        return *this;
    }
    // y += c * o, the one hot loop the time steppers need.
    ScalarField& add_scaled(double c, const ScalarField& o) {
        check_same_grid(o);
        for (size_t i = 0; i < v_.size(); ++i) v_[i] += c * o.v_[i];
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double c, ScalarField a) { return a *= c; }
    friend ScalarField operator*(ScalarField a, double c) { return a *= c; }
    friend ScalarField operator-(ScalarField a) { return a *= -1.0; }

    bool finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    void check_same_grid(const ScalarField& o) const {
        if (!(grid_ == o.grid_)) throw ValidationError("fields live on different grids");
    }

  private:
    TorusGrid grid_;
    std::vector<double> v_;
};

using VectorField = std::array<ScalarField, 3>;

inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
    a.check_same_grid(b);
    ScalarField out(a.grid());
    for (long i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

}  // namespace machlimit
