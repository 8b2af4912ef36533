#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "machlimit/relaxed_rhs.hpp"

namespace machlimit {

enum class Scheme {
    erk4,              // classical explicit RK4 on the full system
    relax_exact_split  // Strang split: exact stress relaxation + RK4 transport
};

inline std::string to_string(Scheme s) {
    return s == Scheme::erk4 ? "erk4" : "relax_exact_split";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "erk4") return Scheme::erk4;
    if (s == "relax_exact_split") return Scheme::relax_exact_split;
    throw ValidationError("unknown scheme '" + s + "' (expected erk4 or relax_exact_split)");
}

// Stability-policy step bound.  The acoustic term scales with eps*dx, the
// relaxation terms with tau (dropped under the split scheme, which integrates
// them exactly), and the conduction term with dx^2.
inline double dt_max(const RelaxedState& st, const PhysParams& p, Scheme scheme, double cfl = 0.5) {
    const double dx = st.grid().dx();
    const double sup_u = std::max({linf_norm(st.u[0]), linf_norm(st.u[1]), linf_norm(st.u[2])});
    double m = p.epsilon * dx / (1.0 + sup_u);
    m = std::min(m, dx * dx / (2.0 * p.kappa_eps * 3.0));
    if (scheme == Scheme::erk4) m = std::min({m, p.tau1_eps, p.tau2_eps});
    return cfl * m;
}

namespace detail {

inline RelaxedState add_scaled_state(const RelaxedState& st, double c, const Tendency& t) {
    RelaxedState out = st;
    out.eta.add_scaled(c, t.eta);
    for (int i = 0; i < 3; ++i) out.u[static_cast<size_t>(i)].add_scaled(c, t.u[static_cast<size_t>(i)]);
    out.phi.add_scaled(c, t.phi);
    out.s1.add_scaled(c, t.s1);
    out.s2.add_scaled(c, t.s2);
    return out;
}

inline void accumulate(Tendency& acc, double c, const Tendency& t) {
    acc.eta.add_scaled(c, t.eta);
    for (int i = 0; i < 3; ++i) acc.u[static_cast<size_t>(i)].add_scaled(c, t.u[static_cast<size_t>(i)]);
    acc.phi.add_scaled(c, t.phi);
    acc.s1.add_scaled(c, t.s1);
    acc.s2.add_scaled(c, t.s2);
}

inline RelaxedState erk4_full(const RelaxedState& st, const PhysParams& p, double dt,
                              const StateSpaceBounds& b) {
    const Tendency k1 = rhs_relaxed(st, p, b);
    const Tendency k2 = rhs_relaxed(add_scaled_state(st, 0.5 * dt, k1), p, b);
    const Tendency k3 = rhs_relaxed(add_scaled_state(st, 0.5 * dt, k2), p, b);
    const Tendency k4 = rhs_relaxed(add_scaled_state(st, dt, k3), p, b);
    Tendency sum = k1;
    accumulate(sum, 2.0, k2);
    accumulate(sum, 2.0, k3);
    accumulate(sum, 1.0, k4);
    return add_scaled_state(st, dt / 6.0, sum);
}

// Exact integration of the stress relaxation over h with the velocity frozen:
// S -> Q(u) + (S - Q(u)) exp(-h/tau).
inline void relax_exact(RelaxedState& st, const PhysParams& p, double h) {
    std::array<std::array<ScalarField, 3>, 3> grad_u;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            grad_u[static_cast<size_t>(i)][static_cast<size_t>(j)] = partial(st.u[static_cast<size_t>(i)], j);
    const ScalarField div_u = grad_u[0][0] + grad_u[1][1] + grad_u[2][2];
    const PackedStress q1 = shear_production(st.u, p.mu_eps, grad_u, div_u);
    const double e1 = std::exp(-h / p.tau1_eps);
    const double e2 = std::exp(-h / p.tau2_eps);
    auto qe = q1.entries();
    auto se = st.s1.entries();
    for (int c = 0; c < 5; ++c) {
        ScalarField& s = *se[static_cast<size_t>(c)];
        const ScalarField& q = *qe[static_cast<size_t>(c)];
        for (long i = 0; i < s.size(); ++i) s[i] = q[i] + (s[i] - q[i]) * e1;
    }
    for (long i = 0; i < st.s2.size(); ++i) {
        const double q = p.lambda_eps * div_u[i];
        st.s2[i] = q + (st.s2[i] - q) * e2;
    }
}

// RK4 on (eta, u, phi) with both stresses frozen.
inline void transport_erk4(RelaxedState& st, const PhysParams& p, double dt, const StateSpaceBounds& b) {
    auto fluid_rhs = [&](const RelaxedState& s) { return rhs_relaxed(s, p, b); };
    auto advance = [&](const RelaxedState& base, double c, const Tendency& t) {
        RelaxedState out = base;
        out.eta.add_scaled(c, t.eta);
        for (int i = 0; i < 3; ++i) out.u[static_cast<size_t>(i)].add_scaled(c, t.u[static_cast<size_t>(i)]);
        out.phi.add_scaled(c, t.phi);
        return out;  // s1, s2 copied from base: frozen
    };
    const Tendency k1 = fluid_rhs(st);
    const Tendency k2 = fluid_rhs(advance(st, 0.5 * dt, k1));
    const Tendency k3 = fluid_rhs(advance(st, 0.5 * dt, k2));
    const Tendency k4 = fluid_rhs(advance(st, dt, k3));
    const double c = dt / 6.0;
    st.eta.add_scaled(c, k1.eta);
    st.eta.add_scaled(2.0 * c, k2.eta);
    st.eta.add_scaled(2.0 * c, k3.eta);
    st.eta.add_scaled(c, k4.eta);
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<size_t>(i);
        st.u[si].add_scaled(c, k1.u[si]);
        st.u[si].add_scaled(2.0 * c, k2.u[si]);
        st.u[si].add_scaled(2.0 * c, k3.u[si]);
        st.u[si].add_scaled(c, k4.u[si]);
    }
    st.phi.add_scaled(c, k1.phi);
    st.phi.add_scaled(2.0 * c, k2.phi);
    st.phi.add_scaled(2.0 * c, k3.phi);
    st.phi.add_scaled(c, k4.phi);
}

}  // namespace detail

// One time step.  Steps above the unscaled stability envelope (the policy
// bound at cfl = 1) are rejected; the policy's cfl factor is the headroom
// that keeps a fixed step valid while sup|u| drifts during a run.  States
// that leave the admissible region are rejected as well.
inline RelaxedState step(const RelaxedState& st, const PhysParams& p, double dt, Scheme scheme,
                         const StateSpaceBounds& bounds = StateSpaceBounds()) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const double bound = dt_max(st, p, scheme, 1.0);
    if (dt > bound * (1.0 + 1e-12))
        throw ValidationError("dt " + std::to_string(dt) + " exceeds stability envelope " +
                              std::to_string(bound));
    RelaxedState out = st;
    if (scheme == Scheme::erk4) {
        out = detail::erk4_full(st, p, dt, bounds);
    } else {
        detail::relax_exact(out, p, 0.5 * dt);
        detail::transport_erk4(out, p, dt, bounds);
        detail::relax_exact(out, p, 0.5 * dt);
    }
    detail::require_admissible(out, p.epsilon, bounds);
    return out;
}

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;   // integral of eta
    double sup_u = 0.0;
    double sup_eta = 0.0;
    double margin_density = 0.0;
    double margin_temperature = 0.0;
    double margin_sup = 0.0;
};

struct AbortInfo {
    long step_index = 0;
    std::string reason;
};

// Time history: sampled states plus per-sample diagnostics.  `abort` is set
// when the run stopped early on an admissibility violation.
struct Trajectory {
    std::vector<double> times;
    std::vector<RelaxedState> states;
    std::vector<DiagnosticsRow> diagnostics;
    double dt = 0.0;
    long n_steps = 0;
    std::optional<AbortInfo> abort;
};

struct SimPolicy {
    Scheme scheme = Scheme::relax_exact_split;
    double cfl = 0.5;
    int sample_every = 10;
    std::optional<double> dt_override;  // bypasses the policy computation, still validated
    StateSpaceBounds bounds;
    bool store_states = true;
};

// Integrate to time T.  The step is fixed for the whole run: the policy value
// at t=0 rounded so that the sample times form a uniform grid ending at T.
inline Trajectory simulate(const RelaxedState& init, const PhysParams& p, double T,
                           const SimPolicy& policy = SimPolicy()) {
    if (!(T > 0.0)) throw ValidationError("simulation horizon T must be positive");
    if (policy.sample_every < 1) throw ValidationError("sample_every must be >= 1");

    RelaxedState st = init;
    // Band-limit the input once; all schemes preserve the property.
    st.eta = dealias(st.eta);
    for (int i = 0; i < 3; ++i) st.u[static_cast<size_t>(i)] = dealias(st.u[static_cast<size_t>(i)]);
    st.phi = dealias(st.phi);
    for (auto* f : st.s1.entries()) *f = dealias(*f);
    st.s2 = dealias(st.s2);
    detail::require_admissible(st, p.epsilon, policy.bounds);

    const double bound = policy.dt_override.value_or(dt_max(st, p, policy.scheme, policy.cfl));
    long n_steps = static_cast<long>(std::ceil(T / bound - 1e-12));
    const long k = std::min<long>(policy.sample_every, n_steps);
    n_steps = ((n_steps + k - 1) / k) * k;  // uniform sample grid incl. t = T
    const double dt = T / static_cast<double>(n_steps);

    Trajectory traj;
    traj.dt = dt;
    traj.n_steps = n_steps;

    auto record = [&](long s) {
        const double t = dt * static_cast<double>(s);
        DiagnosticsRow row;
        row.t = t;
        row.mass = mass(st);
        row.sup_u = std::max({linf_norm(st.u[0]), linf_norm(st.u[1]), linf_norm(st.u[2])});
        row.sup_eta = linf_norm(st.eta);
        const StateSpaceReport rep = in_state_space(st, p.epsilon, policy.bounds);
        row.margin_density = rep.margin_density(policy.bounds);
        row.margin_temperature = rep.margin_temperature(policy.bounds);
        row.margin_sup = rep.margin_sup(policy.bounds);
        traj.times.push_back(t);
        traj.diagnostics.push_back(row);
        if (policy.store_states) traj.states.push_back(st);
    };

    record(0);
    for (long s = 0; s < n_steps; ++s) {
        try {
            st = step(st, p, dt, policy.scheme, policy.bounds);
        } catch (const StateSpaceViolation& e) {
            traj.abort = AbortInfo{s, e.what()};
            return traj;
        }
        if ((s + 1) % k == 0) record(s + 1);
    }
    return traj;
}

}  // namespace machlimit
