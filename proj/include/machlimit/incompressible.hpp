#pragma once

#include <cmath>
#include <vector>

#include "machlimit/spectral_ops.hpp"

namespace machlimit {

// Divergence-free velocity and zero-mean limiting pressure.
struct IncompressibleState {
    VectorField w;
    ScalarField pi;

    IncompressibleState() = default;
    explicit IncompressibleState(const TorusGrid& grid)
        : w{ScalarField(grid), ScalarField(grid), ScalarField(grid)}, pi(grid) {}

    const TorusGrid& grid() const { return pi.grid(); }
};

// Reference state plus the time derivatives the forcing formulas consume.
struct ReferenceFrame {
    double t = 0.0;
    IncompressibleState state;
    VectorField w_t;
    ScalarField pi_t;
};

// Decaying vortex pair: a closed-form solution used as the exact limit
// reference.  w = (sin x1 cos x2, -cos x1 sin x2, 0) e^{-2 mu t},
// pi = (1/4)(cos 2x1 + cos 2x2) e^{-4 mu t}.
inline IncompressibleState taylor_green(double t, double mu_bar, const TorusGrid& grid) {
    if (t < 0.0) throw ValidationError("taylor_green: t must be non-negative");
    IncompressibleState st(grid);
    const double fv = std::exp(-2.0 * mu_bar * t);
    const double fp = std::exp(-4.0 * mu_bar * t);
    st.w[0] = ScalarField::from_function(
        grid, [fv](double x1, double x2, double) { return std::sin(x1) * std::cos(x2) * fv; });
    st.w[1] = ScalarField::from_function(
        grid, [fv](double x1, double x2, double) { return -std::cos(x1) * std::sin(x2) * fv; });
    st.pi = ScalarField::from_function(grid, [fp](double x1, double x2, double) {
        return 0.25 * (std::cos(2.0 * x1) + std::cos(2.0 * x2)) * fp;
    });
    return st;
}

// Exact frame with analytic time derivatives w_t = -2 mu w, pi_t = -4 mu pi.
inline ReferenceFrame taylor_green_frame(double t, double mu_bar, const TorusGrid& grid) {
    ReferenceFrame fr;
    fr.t = t;
    fr.state = taylor_green(t, mu_bar, grid);
    for (int i = 0; i < 3; ++i) fr.w_t[static_cast<size_t>(i)] = -2.0 * mu_bar * fr.state.w[static_cast<size_t>(i)];
    fr.pi_t = -4.0 * mu_bar * fr.state.pi;
    return fr;
}

// Orthogonal projection onto divergence-free fields: per mode
// v -> v - k (k.v)/|k|^2, mean mode untouched.
inline VectorField leray_project(const VectorField& v) {
    std::array<Spectrum, 3> s{to_spectrum(v[0]), to_spectrum(v[1]), to_spectrum(v[2])};
    for (long i = 0; i < s[0].size(); ++i) {
        const auto k = s[0].wavenumbers(i);
        const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        if (k2 == 0.0) continue;
        const std::complex<double> kv =
            (static_cast<double>(k[0]) * s[0][i] + static_cast<double>(k[1]) * s[1][i] +
             static_cast<double>(k[2]) * s[2][i]) / k2;
        for (int j = 0; j < 3; ++j) s[static_cast<size_t>(j)][i] -= static_cast<double>(k[j]) * kv;
    }
    return {to_field(s[0]), to_field(s[1]), to_field(s[2])};
}

inline ScalarField divergence(const VectorField& v) {
    return partial(v[0], 0) + partial(v[1], 1) + partial(v[2], 2);
}

namespace detail {

// Dealiased convective term (w . grad) w.
inline VectorField convection(const VectorField& w) {
    VectorField adv;
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<size_t>(i);
        ScalarField acc = pointwise_product(w[0], partial(w[si], 0));
        acc += pointwise_product(w[1], partial(w[si], 1));
        acc += pointwise_product(w[2], partial(w[si], 2));
        adv[si] = dealias(acc);
    }
    return adv;
}

// Zero-mean solve of  laplace(out) = rhs_spectral.
inline ScalarField poisson_solve(const ScalarField& rhs) {
    Spectrum s = to_spectrum(rhs);
    for (long i = 0; i < s.size(); ++i) {
        const auto k = s.wavenumbers(i);
        const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        s[i] = k2 == 0.0 ? 0.0 : s[i] / (-k2);
    }
    return to_field(s);
}

}  // namespace detail

// Momentum tendency: project the convection away and add diffusion.
inline VectorField rhs_incompressible(const VectorField& w, double mu_bar) {
    const VectorField adv = detail::convection(w);
    VectorField out = leray_project({-adv[0], -adv[1], -adv[2]});
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<size_t>(i);
        out[si].add_scaled(mu_bar, laplacian(w[si]));
    }
    return out;
}

// Pressure recovery: laplace(pi) = -div((w.grad)w), zero-mean gauge.
inline ScalarField pressure_from_w(const VectorField& w) {
    const VectorField adv = detail::convection(w);
    return detail::poisson_solve(-divergence(adv));
}

// Pressure time derivative from the discrete right-hand side (never from
// finite differencing of snapshots): laplace(pi_t) = -div(adv_t) with
// adv_t = (w_t.grad)w + (w.grad)w_t.
inline ScalarField pressure_rate_from_w(const VectorField& w, const VectorField& w_t) {
    VectorField adv_t;
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<size_t>(i);
        ScalarField acc = pointwise_product(w_t[0], partial(w[si], 0));
        acc += pointwise_product(w_t[1], partial(w[si], 1));
        acc += pointwise_product(w_t[2], partial(w[si], 2));
        acc += pointwise_product(w[0], partial(w_t[si], 0));
        acc += pointwise_product(w[1], partial(w_t[si], 1));
        acc += pointwise_product(w[2], partial(w_t[si], 2));
        adv_t[si] = dealias(acc);
    }
    return detail::poisson_solve(-divergence(adv_t));
}

// Frame assembled from the discrete right-hand side for a general velocity.
inline ReferenceFrame frame_from_w(const VectorField& w, double mu_bar, double t) {
    ReferenceFrame fr;
    fr.t = t;
    fr.state.w = w;
    fr.state.pi = pressure_from_w(w);
    fr.w_t = rhs_incompressible(w, mu_bar);
    fr.pi_t = pressure_rate_from_w(w, fr.w_t);
    return fr;
}

inline double incompressible_dt_max(const VectorField& w, double mu_bar, double cfl = 0.5) {
    const double dx = w[0].grid().dx();
    const double sup_w = std::max({linf_norm(w[0]), linf_norm(w[1]), linf_norm(w[2])});
    return cfl * std::min(dx / (1.0 + sup_w), dx * dx / (2.0 * mu_bar * 3.0));
}

// RK4 integration of the limit system from a divergence-free w0; frames
// (including pressure and the time derivatives) are recorded every
// sample_every steps and at t = T.
inline std::vector<ReferenceFrame> simulate_incompressible(const VectorField& w0, double mu_bar,
                                                           double T, double dt, int sample_every = 1,
                                                           double div_tol = 1e-10) {
    if (!(T > 0.0) || !(dt > 0.0)) throw ValidationError("T and dt must be positive");
    if (dt > incompressible_dt_max(w0, mu_bar, 1.0))
        throw ValidationError("dt exceeds the incompressible stability envelope");
    if (l2_norm(divergence(w0)) > div_tol)
        throw ValidationError("initial velocity is not divergence-free within tolerance");

    VectorField w = {dealias(w0[0]), dealias(w0[1]), dealias(w0[2])};
    const long n_steps = static_cast<long>(std::ceil(T / dt - 1e-12));
    const double h = T / static_cast<double>(n_steps);

    std::vector<ReferenceFrame> frames;
    frames.push_back(frame_from_w(w, mu_bar, 0.0));
    for (long s = 0; s < n_steps; ++s) {
        const VectorField k1 = rhs_incompressible(w, mu_bar);
        auto advanced = [&](double c, const VectorField& k) {
            VectorField out = w;
            for (int i = 0; i < 3; ++i) out[static_cast<size_t>(i)].add_scaled(c, k[static_cast<size_t>(i)]);
            return out;
        };
        const VectorField k2 = rhs_incompressible(advanced(0.5 * h, k1), mu_bar);
        const VectorField k3 = rhs_incompressible(advanced(0.5 * h, k2), mu_bar);
        const VectorField k4 = rhs_incompressible(advanced(h, k3), mu_bar);
        for (int i = 0; i < 3; ++i) {
            const auto si = static_cast<size_t>(i);
            w[si].add_scaled(h / 6.0, k1[si]);
            w[si].add_scaled(h / 3.0, k2[si]);
            w[si].add_scaled(h / 3.0, k3[si]);
            w[si].add_scaled(h / 6.0, k4[si]);
        }
        if ((s + 1) % sample_every == 0 || s + 1 == n_steps)
            frames.push_back(frame_from_w(w, mu_bar, h * static_cast<double>(s + 1)));
    }
    return frames;
}

// L2 residual of the limit system for a given state and analytic rate:
// || w_t + (w.grad)w + grad pi - mu laplace w ||_{L2}.
inline double momentum_residual(const ReferenceFrame& fr, double mu_bar) {
    const VectorField adv = detail::convection(fr.state.w);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<size_t>(i);
        ScalarField r = fr.w_t[si] + adv[si] + partial(fr.state.pi, i);
        r.add_scaled(-mu_bar, laplacian(fr.state.w[si]));
        acc += l2_inner(r, r);
    }
    return std::sqrt(acc);
}

}  // namespace machlimit
