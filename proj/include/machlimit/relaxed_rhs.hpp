#pragma once

#include <array>
#include <string>

#include "machlimit/spectral_ops.hpp"
#include "machlimit/state.hpp"

namespace machlimit {

// Time derivatives of the relaxed unknowns; same layout as RelaxedState.
struct Tendency {
    ScalarField eta;
    VectorField u;
    ScalarField phi;
    PackedStress s1;
    ScalarField s2;

    Tendency() = default;
    explicit Tendency(const TorusGrid& grid)
        : eta(grid), u{ScalarField(grid), ScalarField(grid), ScalarField(grid)},
          phi(grid), s1(grid), s2(grid) {}
};

namespace detail {

// Pointwise inverse of 1 + eps*eta; caller guarantees positivity.
inline ScalarField density_inverse(const ScalarField& eta, double eps) {
    ScalarField inv(eta.grid());
    for (long i = 0; i < eta.size(); ++i) inv[i] = 1.0 / (1.0 + eps * eta[i]);
    return inv;
}

inline void require_admissible(const RelaxedState& st, double epsilon, const StateSpaceBounds& b) {
    const StateSpaceReport rep = in_state_space(st, epsilon, b);
    if (!rep.ok) {
        const double margin =
            std::min({rep.margin_density(b), rep.margin_temperature(b), rep.margin_sup(b)});
        throw StateSpaceViolation(rep.worst_field, margin,
                                  "state left the admissible region: " + rep.worst_field +
                                      " (margin " + std::to_string(margin) + ")");
    }
}

}  // namespace detail

// Equilibrium shear production mu*(grad u + grad u^T - (2/3) div u I), packed.
inline PackedStress shear_production(const VectorField& u, double mu,
                                     const std::array<std::array<ScalarField, 3>, 3>& grad_u,
                                     const ScalarField& div_u) {
    PackedStress q(u[0].grid());
    q.a11 = mu * (2.0 * grad_u[0][0] - (2.0 / 3.0) * div_u);
    q.a22 = mu * (2.0 * grad_u[1][1] - (2.0 / 3.0) * div_u);
    q.a12 = mu * (grad_u[0][1] + grad_u[1][0]);
    q.a13 = mu * (grad_u[0][2] + grad_u[2][0]);
    q.a23 = mu * (grad_u[1][2] + grad_u[2][1]);
    return q;
}

// Divergence of the packed stress, row i = sum_j d_j S1(i,j).
inline VectorField stress_divergence(const PackedStress& s) {
    VectorField d;
    d[0] = partial(s.a11, 0) + partial(s.a12, 1) + partial(s.a13, 2);
    d[1] = partial(s.a12, 0) + partial(s.a22, 1) + partial(s.a23, 2);
    d[2] = partial(s.a13, 0) + partial(s.a23, 1) - partial(s.a11, 2) - partial(s.a22, 2);
    return d;
}

// Spectral evaluation of the relaxed system right-hand side in solved form
// (momentum and temperature equations divided through by 1 + eps*eta).
// Every nonlinear product is dealiased by the two-thirds rule.
inline Tendency rhs_relaxed(const RelaxedState& st, const PhysParams& p,
                            const StateSpaceBounds& bounds = StateSpaceBounds()) {
    detail::require_admissible(st, p.epsilon, bounds);
    const TorusGrid& g = st.grid();
    const double eps = p.epsilon;

    std::array<std::array<ScalarField, 3>, 3> grad_u;  // grad_u[i][j] = d_j u_i
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            grad_u[static_cast<size_t>(i)][static_cast<size_t>(j)] = partial(st.u[static_cast<size_t>(i)], j);
    const ScalarField div_u = grad_u[0][0] + grad_u[1][1] + grad_u[2][2];
    const VectorField grad_eta{partial(st.eta, 0), partial(st.eta, 1), partial(st.eta, 2)};
    const VectorField grad_phi{partial(st.phi, 0), partial(st.phi, 1), partial(st.phi, 2)};
    const ScalarField inv = detail::density_inverse(st.eta, eps);

    Tendency out(g);

    // Mass: d_t eta = -u.grad(eta) - div u / eps - eta div u.
    {
        ScalarField adv(g);
        for (long i = 0; i < adv.size(); ++i)
            adv[i] = st.u[0][i] * grad_eta[0][i] + st.u[1][i] * grad_eta[1][i] +
                     st.u[2][i] * grad_eta[2][i] + st.eta[i] * div_u[i];
        out.eta = -dealias(adv);
        out.eta.add_scaled(-1.0 / eps, div_u);
    }

    // Momentum: advection, acoustic pressure coupling, stress forcing.
    const VectorField div_s1 = stress_divergence(st.s1);
    const VectorField grad_s2{partial(st.s2, 0), partial(st.s2, 1), partial(st.s2, 2)};
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<size_t>(i);
        ScalarField adv(g), pres(g), force(g);
        for (long q = 0; q < adv.size(); ++q) {
            adv[q] = st.u[0][q] * grad_u[si][0][q] + st.u[1][q] * grad_u[si][1][q] +
                     st.u[2][q] * grad_u[si][2][q];
            pres[q] = (1.0 + eps * st.phi[q]) * inv[q] * grad_eta[si][q];
            force[q] = (div_s1[si][q] + grad_s2[si][q]) * inv[q];
        }
        out.u[si] = -dealias(adv) + dealias(force);
        ScalarField acoustic = dealias(pres);
        acoustic += grad_phi[si];
        out.u[si].add_scaled(-1.0 / eps, acoustic);
    }

    // Temperature: advection, compression, conduction and stress production.
    {
        ScalarField adv(g), comp(g), diff(g);
        const ScalarField lap_phi = laplacian(st.phi);
        for (long q = 0; q < adv.size(); ++q) {
            adv[q] = st.u[0][q] * grad_phi[0][q] + st.u[1][q] * grad_phi[1][q] +
                     st.u[2][q] * grad_phi[2][q];
            comp[q] = st.phi[q] * div_u[q];
            // (S1 + S2 I) : grad u, full contraction.
            double prod = st.s2[q] * div_u[q];
            prod += st.s1.a11[q] * grad_u[0][0][q] + st.s1.a22[q] * grad_u[1][1][q] -
                    (st.s1.a11[q] + st.s1.a22[q]) * grad_u[2][2][q];
            prod += st.s1.a12[q] * (grad_u[0][1][q] + grad_u[1][0][q]);
            prod += st.s1.a13[q] * (grad_u[0][2][q] + grad_u[2][0][q]);
            prod += st.s1.a23[q] * (grad_u[1][2][q] + grad_u[2][1][q]);
            diff[q] = (p.kappa_eps * lap_phi[q] + eps * prod) * inv[q];
        }
        out.phi = -dealias(adv) + dealias(diff);
        out.phi.add_scaled(-(p.gamma - 1.0) / eps, div_u);
        out.phi.add_scaled(-(p.gamma - 1.0), dealias(comp));
    }

    // Stress relaxation toward the velocity-gradient equilibria (linear).
    {
        const PackedStress q1 = shear_production(st.u, p.mu_eps, grad_u, div_u);
        out.s1 = q1;
        out.s1 -= st.s1;
        out.s1 *= 1.0 / p.tau1_eps;
        out.s2 = p.lambda_eps * div_u - st.s2;
        out.s2 *= 1.0 / p.tau2_eps;
    }
    return out;
}

}  // namespace machlimit
