// Acceptance suite: runs every verification criterion at its pinned
// tolerance and prints one pass/fail line per criterion.  Exit code is the
// number of failed criteria.

#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <string>

#include "machlimit/config.hpp"
#include "machlimit/limit_harness.hpp"
#include "machlimit/symmetrized.hpp"

using namespace machlimit;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

unsigned thread_cap() {
    const char* env = std::getenv("MACHLIMIT_THREADS");
    if (!env) return 0;
    const long v = std::atol(env);
    return v > 0 ? static_cast<unsigned>(v) : 1u;
}

}  // namespace

int main() {
    const TorusGrid grid(16);
    const double gamma = 5.0 / 3.0;
    const double mu_bar = 0.1, lambda_bar = 0.1, kappa_bar = 0.1;
    const std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};

    // Criteria 1, 2, 10 share one sweep: N=16, s=2, T*=0.5, split scheme,
    // linear tau rule, exact vortex reference.
    SweepSettings sweep_cfg;
    sweep_cfg.eps_list = eps_list;
    sweep_cfg.n = 16;
    sweep_cfg.s = 2;
    sweep_cfg.T_star = 0.5;
    sweep_cfg.scheme = Scheme::relax_exact_split;
    sweep_cfg.gamma = gamma;
    sweep_cfg.mu_bar = mu_bar;
    sweep_cfg.lambda_bar = lambda_bar;
    sweep_cfg.kappa_bar = kappa_bar;
    sweep_cfg.threads = thread_cap();
    const SweepReport sweep = convergence_sweep(sweep_cfg);

    {
        const double slope = sweep.slope_fields.value_or(0.0);
        const bool pass = !sweep.any_abort && sweep.ratio_fields <= 3.0 && slope >= 0.8;
        report(1, "field-variable rate", pass,
               "sup_t E_fields/eps ratio " + fmt(sweep.ratio_fields) + " (<=3), slope " + fmt(slope) +
                   " (>=0.8), K " + fmt(sweep.K));
    }
    {
        const double slope = sweep.slope_stress.value_or(0.0);
        const bool pass = !sweep.any_abort && sweep.ratio_stress <= 3.0;
        report(2, "stress rate", pass,
               "sup_t E_stress/sqrt(eps) ratio " + fmt(sweep.ratio_stress) + " (<=3), slope " +
                   fmt(slope) + ", K' " + fmt(sweep.K_prime));
    }

    {
        const ForcingBoundTable t =
            forcing_bound_check(eps_list, grid, 2, mu_bar, lambda_bar, kappa_bar, gamma);
        double worst = 0.0;
        for (double r : t.column_ratio) worst = std::max(worst, r);
        report(3, "forcing bounds", t.pass,
               "max column ratio of ||f_i||_s/eps = " + fmt(worst) + " (<=3)");
    }

    {
        const PhysParams p = scaled_params(0.1, mu_bar, lambda_bar, kappa_bar, gamma);
        const SymmetrizerReport rep = check_symmetrizable(p, 100, 42);
        const bool pass = rep.symmetric_ok && rep.positivity_ok && rep.damping_psd_ok;
        report(4, "symmetrizability", pass,
               "100 samples: worst asymmetry " + fmt(rep.worst_asymmetry) + " (<=1e-12), min A0~ " +
                   fmt(rep.min_A0_transformed) + " (>0)");
    }

    {
        Rng rng(42);
        double worst = 0.0;
        const auto alphas = multi_indices_up_to(2);
        for (int set = 0; set < 50; ++set) {
            PackedStress s1(grid);
            for (auto* f : s1.entries()) *f = random_band_limited(grid, rng, 5, 1.0);
            const ScalarField s2 = random_band_limited(grid, rng, 5, 1.0);
            const VectorField u{random_band_limited(grid, rng, 5, 1.0),
                                random_band_limited(grid, rng, 5, 1.0),
                                random_band_limited(grid, rng, 5, 1.0)};
            for (const MultiIndex& a : alphas) {
                const CancellationResiduals r = cancellation_check(s1, s2, u, a);
                worst = std::max({worst, r.stress_identity, r.scalar_identity});
            }
        }
        report(5, "cancellation identities", worst <= 1e-10,
               "50 sets x |alpha|<=2: worst residual " + fmt(worst) + " (<=1e-10)");
    }

    double max_div_w = 0.0;
    {
        const IncompressibleState exact0 = taylor_green(0.0, mu_bar, grid);
        const double dt = incompressible_dt_max(exact0.w, mu_bar);
        const auto frames = simulate_incompressible(exact0.w, mu_bar, 1.0, dt, 2);
        double norm0 = 0.0;
        for (int i = 0; i < 3; ++i) norm0 += l2_inner(exact0.w[i], exact0.w[i]);
        double worst_rel = 0.0;
        for (const ReferenceFrame& fr : frames) {
            const IncompressibleState exact = taylor_green(fr.t, mu_bar, grid);
            double err = 0.0;
            for (int i = 0; i < 3; ++i) {
                const ScalarField d = fr.state.w[i] - exact.w[i];
                err += l2_inner(d, d);
            }
            worst_rel = std::max(worst_rel, std::sqrt(err / norm0));
            max_div_w = std::max(max_div_w, l2_norm(divergence(fr.state.w)));
        }
        double worst_res = 0.0;
        for (double t : {0.0, 0.5, 1.0})
            worst_res = std::max(worst_res, momentum_residual(taylor_green_frame(t, mu_bar, grid), mu_bar));
        const bool pass = worst_rel <= 1e-6 && worst_res <= 1e-12;
        report(6, "incompressible oracle", pass,
               "rel L2 error " + fmt(worst_rel) + " (<=1e-6), exact residual " + fmt(worst_res) +
                   " (<=1e-12)");
    }

    {
        // Conservation and structure: mass drift, packed-stress structure,
        // rest-state fixity, divergence preservation.
        const PhysParams p = scaled_params(0.1, mu_bar, lambda_bar, kappa_bar, gamma);
        const IncompressibleState tg = taylor_green(0.0, mu_bar, grid);
        const RelaxedState init = well_prepared_initial(tg.w, tg.pi, p);
        SimPolicy policy;
        policy.scheme = Scheme::relax_exact_split;
        const Trajectory traj = simulate(init, p, 0.5, policy);
        double drift = 0.0;
        const double mass0 = traj.diagnostics.front().mass;
        for (const DiagnosticsRow& d : traj.diagnostics)
            if (d.t > 0.0) drift = std::max(drift, std::abs(d.mass - mass0) / std::max(d.t, 1.0));

        double structure = 0.0;
        for (const RelaxedState& st : traj.states) {
            const StressMatrix m = unpack_stress(st.s1);
            structure = std::max(structure, linf_norm(m[0][0] + m[1][1] + m[2][2]));
            structure = std::max(structure, linf_norm(m[0][1] - m[1][0]));
            structure = std::max(structure, linf_norm(m[0][2] - m[2][0]));
            structure = std::max(structure, linf_norm(m[1][2] - m[2][1]));
        }

        RelaxedState rest(grid);
        const double dt_rest = dt_max(rest, p, Scheme::erk4);
        double rest_sup = 0.0;
        for (int it = 0; it < 1000; ++it) rest = step(rest, p, dt_rest, Scheme::erk4);
        rest_sup = std::max({linf_norm(rest.eta), linf_norm(rest.u[0]), linf_norm(rest.u[1]),
                             linf_norm(rest.u[2]), linf_norm(rest.phi), linf_norm(rest.s2)});
        for (const auto* f : rest.s1.entries()) rest_sup = std::max(rest_sup, linf_norm(*f));

        const bool pass = !traj.abort && drift <= 1e-10 && structure <= 1e-14 && rest_sup <= 1e-15 &&
                          max_div_w <= 1e-11;
        report(7, "conservation/structure", pass,
               "mass drift " + fmt(drift) + " (<=1e-10/unit t), stress structure " + fmt(structure) +
                   " (<=1e-14), rest sup after 1000 steps " + fmt(rest_sup) + ", div w " +
                   fmt(max_div_w) + " (<=1e-11)");
    }

    {
        const PhysParams p = scaled_params(0.1, mu_bar, lambda_bar, kappa_bar, gamma);
        const IncompressibleState tg = taylor_green(0.0, mu_bar, grid);
        const RelaxedState init = well_prepared_initial(tg.w, tg.pi, p);
        const ApproxState a = approximate_solution(tg, p);
        const EnergyReport e0 = energy_E(error_state(init, a), p, 2);

        Rng rng(42);
        double worst_rel = 0.0;
        for (int rep_i = 0; rep_i < 5; ++rep_i) {
            ErrorState e;
            e.eta_d = random_band_limited(grid, rng, 4, 1.0);
            for (int i = 0; i < 3; ++i) e.u_d[i] = random_band_limited(grid, rng, 4, 1.0);
            e.phi_d = random_band_limited(grid, rng, 4, 1.0);
            e.s1_d = PackedStress(grid);
            for (auto* f : e.s1_d.entries()) *f = random_band_limited(grid, rng, 4, 1.0);
            e.s2_d = random_band_limited(grid, rng, 4, 1.0);
            const EnergyReport r = energy_E(e, p, 2);
            const StressMatrix m = unpack_stress(e.s1_d);
            double s1_sq = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) s1_sq += sobolev_norm_sq(m[i][j], 2);
            const double total = std::sqrt(r.e_fields * r.e_fields + p.tau1_eps * s1_sq +
                                           p.tau2_eps * r.s2_norm * r.s2_norm);
            worst_rel = std::max(worst_rel, std::abs(r.e_total - total) / total);
        }
        const bool pass = e0.e_total <= 1e-14 && worst_rel <= 1e-12;
        report(8, "well-preparedness identity", pass,
               "E(0) = " + fmt(e0.e_total) + " (<=1e-14), definition identity rel err " +
                   fmt(worst_rel) + " (<=1e-12)");
    }

    {
        const PhysParams p = scaled_params(0.2, mu_bar, lambda_bar, kappa_bar, gamma);
        const IncompressibleState tg = taylor_green(0.0, mu_bar, grid);
        const RelaxedState init = well_prepared_initial(tg.w, tg.pi, p);
        const double T = 0.04;
        auto final_state = [&](Scheme s, double dt) {
            SimPolicy policy;
            policy.scheme = s;
            policy.dt_override = dt;
            policy.sample_every = 1 << 20;
            return simulate(init, p, T, policy).states.back();
        };
        auto distance = [](const RelaxedState& a, const RelaxedState& b) {
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
        };
        auto order_of = [&](Scheme s) {
            const double dt = T / 20.0;
            const RelaxedState a = final_state(s, dt);
            const RelaxedState b = final_state(s, dt / 2.0);
            const RelaxedState c = final_state(s, dt / 4.0);
            return std::log2(distance(a, b) / distance(b, c));
        };
        const double o_erk4 = order_of(Scheme::erk4);
        const double o_split = order_of(Scheme::relax_exact_split);
        const bool pass = o_erk4 >= 3.5 && o_split >= 1.9;
        report(9, "temporal order", pass,
               "erk4 order " + fmt(o_erk4) + " (>=3.5), split order " + fmt(o_split) + " (>=1.9)");
    }

    {
        const bool pass = !sweep.any_abort && sweep.ratio_gronwall > 0.0 && sweep.ratio_gronwall <= 5.0;
        std::string cs;
        for (size_t i = 0; i < sweep.rows.size(); ++i)
            cs += (i ? ", " : "") + fmt(sweep.rows[i].gronwall_c);
        report(10, "gronwall diagnostic", pass,
               "fitted C per eps {" + cs + "}, max/min " + fmt(sweep.ratio_gronwall) + " (<=5)");
    }

    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
