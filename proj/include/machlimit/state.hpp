#pragma once

#include <array>
#include <cmath>
#include <string>

#include "machlimit/field.hpp"
#include "machlimit/params.hpp"
#include "machlimit/spectral_ops.hpp"

namespace machlimit {

// Symmetric traceless 3x3 stress stored through its five free entries; the
// (3,3) entry is reconstructed as -(a11+a22), so the trace vanishes exactly.
struct PackedStress {
    ScalarField a11, a12, a13, a22, a23;

    PackedStress() = default;
    explicit PackedStress(const TorusGrid& grid)
        : a11(grid), a12(grid), a13(grid), a22(grid), a23(grid) {}

    const TorusGrid& grid() const { return a11.grid(); }

    std::array<ScalarField*, 5> entries() { return {&a11, &a12, &a13, &a22, &a23}; }
    std::array<const ScalarField*, 5> entries() const { return {&a11, &a12, &a13, &a22, &a23}; }

    // Reconstructed (i,j) entry.
    ScalarField component(int i, int j) const {
        const int lo = std::min(i, j), hi = std::max(i, j);
        if (lo == 0 && hi == 0) return a11;
        if (lo == 0 && hi == 1) return a12;
        if (lo == 0 && hi == 2) return a13;
        if (lo == 1 && hi == 1) return a22;
        if (lo == 1 && hi == 2) return a23;
        return -(a11 + a22);
    }

    PackedStress& operator+=(const PackedStress& o) {
        a11 += o.a11; a12 += o.a12; a13 += o.a13; a22 += o.a22; a23 += o.a23;
        return *this;
    }
    PackedStress& operator-=(const PackedStress& o) {
        a11 -= o.a11; a12 -= o.a12; a13 -= o.a13; a22 -= o.a22; a23 -= o.a23;
        return *this;
    }
    PackedStress& operator*=(double c) {
        a11 *= c; a12 *= c; a13 *= c; a22 *= c; a23 *= c;
        return *this;
    }
    PackedStress& add_scaled(double c, const PackedStress& o) {
        a11.add_scaled(c, o.a11); a12.add_scaled(c, o.a12); a13.add_scaled(c, o.a13);
        a22.add_scaled(c, o.a22); a23.add_scaled(c, o.a23);
        return *this;
    }
    friend PackedStress operator-(PackedStress a, const PackedStress& b) { return a -= b; }
};

using StressMatrix = std::array<std::array<ScalarField, 3>, 3>;

// Pack a symmetric traceless matrix field; rejects inputs violating either
// property beyond tol pointwise.
inline PackedStress pack_stress(const StressMatrix& m, double tol = 1e-12) {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const ScalarField diff = m[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                                     m[static_cast<size_t>(j)][static_cast<size_t>(i)];
            if (linf_norm(diff) > tol)
                throw ValidationError("pack_stress: matrix not symmetric within tolerance at entry (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
    const ScalarField trace = m[0][0] + m[1][1] + m[2][2];
    if (linf_norm(trace) > tol)
        throw ValidationError("pack_stress: matrix trace exceeds tolerance");
    PackedStress out;
    out.a11 = m[0][0];
    out.a12 = m[0][1];
    out.a13 = m[0][2];
    out.a22 = m[1][1];
    out.a23 = m[1][2];
    return out;
}

inline StressMatrix unpack_stress(const PackedStress& s) {
    StressMatrix m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = s.component(i, j);
    return m;
}

// Unknowns of the relaxed system: density/temperature perturbations, velocity
// and the two relaxed stresses (rho = 1 + eps eta, theta = 1 + eps phi).
struct RelaxedState {
    ScalarField eta;
    VectorField u;
    ScalarField phi;
    PackedStress s1;
    ScalarField s2;

    RelaxedState() = default;
    explicit RelaxedState(const TorusGrid& grid)
        : eta(grid), u{ScalarField(grid), ScalarField(grid), ScalarField(grid)},
          phi(grid), s1(grid), s2(grid) {}

    const TorusGrid& grid() const { return eta.grid(); }
};

// Admissible-region bounds: non-vacuum margin for 1+eps*eta and 1+eps*phi,
// plus a sup-norm ceiling for every field.
struct StateSpaceBounds {
    double delta_G = 0.5;
    double sup_bound = 10.0;  // M_G

    StateSpaceBounds() = default;
    StateSpaceBounds(double delta, double sup) : delta_G(delta), sup_bound(sup) {
        if (!(delta_G > 0.0 && delta_G < 1.0)) throw ValidationError("delta_G must lie in (0,1)");
        if (!(sup_bound > 0.0)) throw ValidationError("sup bound must be positive");
    }
};

// Worst-case values of the bounded quantities: the smallest 1+eps*eta and
// 1+eps*phi over the grid and the largest field sup-norm.
struct StateSpaceReport {
    bool ok = true;
    double min_density = 0.0;      // min over the grid of 1 + eps*eta
    double min_temperature = 0.0;  // min over the grid of 1 + eps*phi
    double max_sup = 0.0;          // largest sup-norm among all fields
    std::string worst_field;

    double margin_density(const StateSpaceBounds& b) const { return min_density - b.delta_G; }
    double margin_temperature(const StateSpaceBounds& b) const { return min_temperature - b.delta_G; }
    double margin_sup(const StateSpaceBounds& b) const { return b.sup_bound - max_sup; }
};

// Pointwise membership test in the compact state region.
inline StateSpaceReport in_state_space(const RelaxedState& st, double epsilon,
                                       const StateSpaceBounds& b = StateSpaceBounds()) {
    StateSpaceReport r;
    double min_rho = 1e300, min_theta = 1e300;
    for (long i = 0; i < st.eta.size(); ++i) min_rho = std::min(min_rho, 1.0 + epsilon * st.eta[i]);
    for (long i = 0; i < st.phi.size(); ++i) min_theta = std::min(min_theta, 1.0 + epsilon * st.phi[i]);
    r.min_density = min_rho;
    r.min_temperature = min_theta;

    double worst_sup = 0.0;
    std::string worst = "eta";
    auto scan = [&](const ScalarField& f, const char* name) {
        const double s = linf_norm(f);
        if (s > worst_sup) {
            worst_sup = s;
            worst = name;
        }
    };
    scan(st.eta, "eta");
    scan(st.u[0], "u1");
    scan(st.u[1], "u2");
    scan(st.u[2], "u3");
    scan(st.phi, "phi");
    scan(st.s1.a11, "s1.a11");
    scan(st.s1.a12, "s1.a12");
    scan(st.s1.a13, "s1.a13");
    scan(st.s1.a22, "s1.a22");
    scan(st.s1.a23, "s1.a23");
    scan(st.s2, "s2");
    r.max_sup = worst_sup;

    const bool finite = st.eta.finite() && st.u[0].finite() && st.u[1].finite() && st.u[2].finite() &&
                        st.phi.finite() && st.s2.finite();
    r.ok = finite && r.min_density >= b.delta_G && r.min_temperature >= b.delta_G &&
           r.max_sup <= b.sup_bound;
    if (!finite) {
        r.ok = false;
        r.worst_field = "non-finite values";
    } else if (r.min_density < b.delta_G) {
        r.worst_field = "eta (density bound)";
    } else if (r.min_temperature < b.delta_G) {
        r.worst_field = "phi (temperature bound)";
    } else if (r.max_sup > b.sup_bound) {
        r.worst_field = worst + " (sup bound)";
    }
    return r;
}

inline double mass(const RelaxedState& st) { return integral(st.eta); }

}  // namespace machlimit
