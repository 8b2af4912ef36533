#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "machlimit/limit_harness.hpp"
#include "machlimit/time_integration.hpp"

using namespace machlimit;

namespace {

double state_distance(const RelaxedState& a, const RelaxedState& b) {
    double acc = 0.0;
    auto add = [&](const ScalarField& x, const ScalarField& y) {
        const ScalarField d = x - y;
        acc += l2_inner(d, d);
    };
    add(a.eta, b.eta);
    for (int i = 0; i < 3; ++i) add(a.u[i], b.u[i]);
    add(a.phi, b.phi);
    add(a.s1.a11, b.s1.a11);
    add(a.s1.a12, b.s1.a12);
    add(a.s1.a13, b.s1.a13);
    add(a.s1.a22, b.s1.a22);
    add(a.s1.a23, b.s1.a23);
    add(a.s2, b.s2);
    return std::sqrt(acc);
}

double tendency_sup(const Tendency& t) {
    double m = std::max({linf_norm(t.eta), linf_norm(t.phi), linf_norm(t.s2)});
    for (int i = 0; i < 3; ++i) m = std::max(m, linf_norm(t.u[i]));
    for (const auto* f : t.s1.entries()) m = std::max(m, linf_norm(*f));
    return m;
}

}  // namespace

TEST_CASE("rest state is steady") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    const Tendency t = rhs_relaxed(RelaxedState(g), p);
    CHECK(tendency_sup(t) == 0.0);
}

TEST_CASE("constant stress relaxes, no force from its gradient") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    RelaxedState st(g);
    const double c = 0.7;
    st.s2 = ScalarField(g, c);
    const Tendency t = rhs_relaxed(st, p);
    CHECK(linf_norm(t.s2 + ScalarField(g, c / p.tau2_eps)) <= 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(linf_norm(t.u[i]) <= 1e-13);
    CHECK(linf_norm(t.eta) == 0.0);
    CHECK(linf_norm(t.phi) <= 1e-13);
    for (const auto* f : t.s1.entries()) CHECK(linf_norm(*f) <= 1e-13);
}

TEST_CASE("shear wave produces only stress growth") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    RelaxedState st(g);
    st.u[0] = ScalarField::from_function(g, [](double, double x2, double) { return std::sin(x2); });
    const Tendency t = rhs_relaxed(st, p);

    CHECK(linf_norm(t.eta) <= 1e-13);  // div u = 0
    CHECK(linf_norm(t.phi) <= 1e-13);
    CHECK(linf_norm(t.u[0]) <= 1e-12);  // no self-advection for this profile
    const ScalarField expected = ScalarField::from_function(
        g, [&](double, double x2, double) { return p.mu_eps * std::cos(x2) / p.tau1_eps; });
    CHECK(linf_norm(t.s1.a12 - expected) <= 1e-11);
    CHECK(linf_norm(t.s1.a11) <= 1e-12);
    CHECK(linf_norm(t.s1.a13) <= 1e-12);
}

TEST_CASE("admissibility violations carry the offending field") {
    const TorusGrid g(8);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    RelaxedState st(g);
    st.eta = ScalarField(g, -9.0);  // 1 + eps*eta = 0.1
    try {
        rhs_relaxed(st, p);
        FAIL("expected a state-space violation");
    } catch (const StateSpaceViolation& e) {
        CHECK(e.field == "eta (density bound)");
        CHECK(e.margin < 0.0);
    }
}

TEST_CASE("step policy") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    const RelaxedState zero(g);

    SECTION("policy arithmetic at rest") {
        const double dx = kTwoPi / 16.0;
        const double expected = 0.5 * std::min({0.1 * dx / 1.0, 0.1, dx * dx / 0.6});
        CHECK(dt_max(zero, p, Scheme::erk4) == Catch::Approx(expected).epsilon(1e-14));
        // Split scheme drops the relaxation times from the minimum.
        const double expected_split = 0.5 * std::min(0.1 * dx, dx * dx / 0.6);
        CHECK(dt_max(zero, p, Scheme::relax_exact_split) == Catch::Approx(expected_split).epsilon(1e-14));
    }
    SECTION("oversized steps are rejected") {
        const double envelope = dt_max(zero, p, Scheme::erk4, 1.0);
        CHECK_THROWS_AS(step(zero, p, 2.0 * envelope, Scheme::erk4), ValidationError);
        CHECK_THROWS_AS(step(zero, p, -0.1, Scheme::erk4), ValidationError);
    }
    SECTION("zero state is a fixed point of both schemes") {
        for (Scheme s : {Scheme::erk4, Scheme::relax_exact_split}) {
            RelaxedState st = zero;
            const double dt = dt_max(st, p, s);
            for (int it = 0; it < 5; ++it) st = step(st, p, dt, s);
            CHECK(state_distance(st, zero) == 0.0);
        }
    }
}

TEST_CASE("exact relaxation factor in the split scheme") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    RelaxedState st(g);
    const double c = 0.4;
    st.s2 = ScalarField(g, c);
    const double dt = dt_max(st, p, Scheme::relax_exact_split);
    const RelaxedState out = step(st, p, dt, Scheme::relax_exact_split);
    const double expected = c * std::exp(-dt / p.tau2_eps);
    CHECK(linf_norm(out.s2 - ScalarField(g, expected)) <= 1e-14);
    CHECK(linf_norm(out.eta) == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(linf_norm(out.u[i]) <= 1e-14);
}

TEST_CASE("erk4 reproduces the relaxation exponential to fifth order") {
    const TorusGrid g(8);
    PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    RelaxedState st(g);
    st.s2 = ScalarField(g, 1.0);
    const double dt = p.tau2_eps / 10.0;
    REQUIRE(dt <= dt_max(st, p, Scheme::erk4, 1.0));
    const RelaxedState out = step(st, p, dt, Scheme::erk4);
    const double z = -dt / p.tau2_eps;
    const double poly = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
    // matches the 4th-order Taylor polynomial exactly, the exponential to O(dt^5)
    CHECK(linf_norm(out.s2 - ScalarField(g, poly)) <= 1e-14);
    CHECK(std::abs(poly - std::exp(z)) <= std::pow(std::abs(z), 5) / 100.0);
}

TEST_CASE("simulate from rest yields a zero trajectory") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    SimPolicy policy;
    policy.sample_every = 2;
    const Trajectory traj = simulate(RelaxedState(g), p, 0.1, policy);
    REQUIRE_FALSE(traj.abort.has_value());
    for (const DiagnosticsRow& d : traj.diagnostics) {
        CHECK(d.mass == 0.0);
        CHECK(d.sup_u == 0.0);
        CHECK(d.sup_eta == 0.0);
    }
    CHECK(linf_norm(traj.states.back().s2) == 0.0);
}

TEST_CASE("well-prepared run: mass conservation and stress structure") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.1, 0.1, 0.1, 0.1, 5.0 / 3.0);
    const IncompressibleState tg = taylor_green(0.0, 0.1, g);
    const RelaxedState init = well_prepared_initial(tg.w, tg.pi, p);

    SimPolicy policy;
    policy.scheme = Scheme::relax_exact_split;
    const Trajectory traj = simulate(init, p, 0.2, policy);
    REQUIRE_FALSE(traj.abort.has_value());
    REQUIRE(traj.times.back() == Catch::Approx(0.2));

    const double mass0 = traj.diagnostics.front().mass;
    CHECK(std::abs(mass0) <= 1e-12);  // zero-mean pressure gauge
    for (const DiagnosticsRow& d : traj.diagnostics) {
        CHECK(std::abs(d.mass - mass0) <= 1e-10);
        CHECK(d.margin_density > 0.0);
        CHECK(d.margin_temperature > 0.0);
    }

    // Unpacked stress stays symmetric and traceless exactly.
    const StressMatrix m = unpack_stress(traj.states.back().s1);
    CHECK(linf_norm(m[0][0] + m[1][1] + m[2][2]) == 0.0);
    CHECK(linf_norm(m[0][1] - m[1][0]) == 0.0);
}

TEST_CASE("temporal self-convergence orders") {
    const TorusGrid g(16);
    const PhysParams p = scaled_params(0.2, 0.1, 0.1, 0.1, 5.0 / 3.0);
    const IncompressibleState tg = taylor_green(0.0, 0.1, g);
    const RelaxedState init = well_prepared_initial(tg.w, tg.pi, p);
    const double T = 0.04;

    auto run = [&](Scheme s, double dt) {
        SimPolicy policy;
        policy.scheme = s;
        policy.dt_override = dt;
        policy.sample_every = 1000000;  // endpoints only
        const Trajectory traj = simulate(init, p, T, policy);
        REQUIRE_FALSE(traj.abort.has_value());
        return traj.states.back();
    };

    SECTION("erk4 order >= 3.5") {
        const double dt = T / 20.0;
        const RelaxedState a = run(Scheme::erk4, dt);
        const RelaxedState b = run(Scheme::erk4, dt / 2.0);
        const RelaxedState c = run(Scheme::erk4, dt / 4.0);
        const double order = std::log2(state_distance(a, b) / state_distance(b, c));
        INFO("erk4 observed order " << order);
        CHECK(order >= 3.5);
    }
    SECTION("strang split order >= 1.9") {
        const double dt = T / 20.0;
        const RelaxedState a = run(Scheme::relax_exact_split, dt);
        const RelaxedState b = run(Scheme::relax_exact_split, dt / 2.0);
        const RelaxedState c = run(Scheme::relax_exact_split, dt / 4.0);
        const double order = std::log2(state_distance(a, b) / state_distance(b, c));
        INFO("split observed order " << order);
        CHECK(order >= 1.9);
    }
}

TEST_CASE("simulate aborts with partial trajectory on region violation") {
    const TorusGrid g(8);
    PhysParams p = scaled_params(0.5, 0.1, 0.1, 0.1, 5.0 / 3.0);
    RelaxedState st(g);
    // Large inward velocity field drives the density out of the region fast.
    st.u[0] = ScalarField::from_function(g, [](double x1, double, double) { return 3.0 * std::sin(x1); });
    st.eta = ScalarField::from_function(g, [](double x1, double, double) { return -0.9 * std::cos(x1); });
    SimPolicy policy;
    policy.scheme = Scheme::relax_exact_split;
    policy.bounds = StateSpaceBounds(0.9, 10.0);  // tight region to force the abort
    policy.sample_every = 1;
    bool threw_upfront = false;
    Trajectory traj;
    try {
        traj = simulate(st, p, 2.0, policy);
    } catch (const StateSpaceViolation&) {
        threw_upfront = true;  // initial data already outside the tight region
    }
    if (!threw_upfront) {
        REQUIRE(traj.abort.has_value());
        CHECK(traj.abort->step_index >= 0);
        CHECK_FALSE(traj.diagnostics.empty());
    }
}
