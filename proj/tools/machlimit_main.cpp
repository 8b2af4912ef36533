// Command-line front end: configuration, dispatch, CSV report emission.
// Exit codes: 0 success, 2 validation error, 3 numerical abort (admissible-
// region violation), 4 check-command assertion failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "machlimit/config.hpp"
#include "machlimit/csv.hpp"
#include "machlimit/symmetrized.hpp"

namespace {

using namespace machlimit;

unsigned thread_cap() {
    const char* env = std::getenv("MACHLIMIT_THREADS");
    if (!env) return 0;  // auto
    const long v = std::atol(env);
    return v > 0 ? static_cast<unsigned>(v) : 1u;
}

std::string artifact_path(const std::string& out_dir, const std::string& name) {
    std::filesystem::create_directories(out_dir);
    return (std::filesystem::path(out_dir) / name).string();
}

int run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    const TorusGrid grid(cfg.grid_n);
    const PhysParams p = cfg.params();
    const ReferenceFrame fr0 = taylor_green_frame(0.0, cfg.mu_bar, grid);
    const RelaxedState init = well_prepared_initial(fr0.state.w, fr0.state.pi, p);

    SimPolicy policy;
    policy.scheme = scheme_from_string(cfg.scheme);
    policy.cfl = cfg.cfl;
    policy.sample_every = cfg.sample_every;
    policy.store_states = false;
    const Trajectory traj = simulate(init, p, cfg.T, policy);

    CsvWriter csv(artifact_path(out_dir, "trajectory.csv"));
    csv.comment("relaxed-system trajectory from well-prepared vortex data");
    csv.provenance(cfg.resolved());
    csv.comment("dt = " + fmt_double(traj.dt) + ", steps = " + std::to_string(traj.n_steps));
    csv.row({"t", "mass", "sup_u", "sup_eta", "margin_density", "margin_temperature", "margin_sup"});
    for (const DiagnosticsRow& d : traj.diagnostics)
        csv.row({fmt_double(d.t), fmt_double(d.mass), fmt_double(d.sup_u), fmt_double(d.sup_eta),
                 fmt_double(d.margin_density), fmt_double(d.margin_temperature), fmt_double(d.margin_sup)});
    if (traj.abort) {
        csv.comment("aborted at step " + std::to_string(traj.abort->step_index) + ": " + traj.abort->reason);
        std::cerr << "simulate aborted: " << traj.abort->reason << "\n";
        return 3;
    }
    return 0;
}

int run_reference(const RunConfig& cfg, const std::string& out_dir) {
    const TorusGrid grid(cfg.grid_n);
    const IncompressibleState exact0 = taylor_green(0.0, cfg.mu_bar, grid);
    const double dt = incompressible_dt_max(exact0.w, cfg.mu_bar, cfg.cfl);
    const auto frames = simulate_incompressible(exact0.w, cfg.mu_bar, cfg.T, dt, cfg.sample_every);

    CsvWriter csv(artifact_path(out_dir, "reference_series.csv"));
    csv.comment("incompressible reference solver vs the exact decaying vortex");
    csv.provenance(cfg.resolved());
    csv.row({"t", "err_l2_vs_exact", "div_w_l2", "l2_w", "l2_pi", "momentum_residual_l2"});
    for (const ReferenceFrame& fr : frames) {
        const IncompressibleState exact = taylor_green(fr.t, cfg.mu_bar, grid);
        double err_sq = 0.0, w_sq = 0.0;
        for (int i = 0; i < 3; ++i) {
            const auto si = static_cast<size_t>(i);
            const ScalarField diff = fr.state.w[si] - exact.w[si];
            err_sq += l2_inner(diff, diff);
            w_sq += l2_inner(fr.state.w[si], fr.state.w[si]);
        }
        csv.row({fmt_double(fr.t), fmt_double(std::sqrt(err_sq)),
                 fmt_double(l2_norm(divergence(fr.state.w))), fmt_double(std::sqrt(w_sq)),
                 fmt_double(l2_norm(fr.state.pi)), fmt_double(momentum_residual(fr, cfg.mu_bar))});
    }

    CsvWriter snap(artifact_path(out_dir, "reference_final_fields.csv"));
    snap.comment("final-time velocity/pressure snapshot");
    snap.provenance(cfg.resolved());
    snap.row({"x1", "x2", "x3", "w1", "w2", "w3", "pi"});
    const ReferenceFrame& last = frames.back();
    const int n = grid.n();
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3)
                snap.row({fmt_double(grid.coord(i1)), fmt_double(grid.coord(i2)), fmt_double(grid.coord(i3)),
                          fmt_double(last.state.w[0].at(i1, i2, i3)), fmt_double(last.state.w[1].at(i1, i2, i3)),
                          fmt_double(last.state.w[2].at(i1, i2, i3)), fmt_double(last.state.pi.at(i1, i2, i3))});
    return 0;
}

int run_sweep(const RunConfig& cfg, const std::string& out_dir) {
    SweepSettings settings;
    settings.eps_list = cfg.eps_list;
    settings.n = cfg.grid_n;
    settings.s = cfg.s;
    settings.T_star = cfg.T;
    settings.scheme = scheme_from_string(cfg.scheme);
    settings.cfl = cfg.cfl;
    settings.sample_every = cfg.sample_every;
    settings.gamma = cfg.gamma;
    settings.mu_bar = cfg.mu_bar;
    settings.lambda_bar = cfg.lambda_bar;
    settings.kappa_bar = cfg.kappa_bar;
    settings.tau_rule = cfg.tau();
    settings.threads = thread_cap();
    settings.seed = cfg.seed;
    const SweepReport rep = convergence_sweep(settings);

    CsvWriter csv(artifact_path(out_dir, "sweep_report.csv"));
    csv.comment("epsilon sweep: sup-in-time error norms against the exact reference");
    csv.provenance(cfg.resolved());
    csv.row({"eps", "sup_E_fields", "sup_E_stress", "E_fields_over_eps", "E_stress_over_sqrt_eps"});
    for (const SweepRow& r : rep.rows)
        csv.row({fmt_double(r.eps), fmt_double(r.sup_e_fields), fmt_double(r.sup_e_stress),
                 fmt_double(r.sup_e_fields / r.eps), fmt_double(r.sup_e_stress / std::sqrt(r.eps))});
    csv.comment("slope_fields = " + (rep.slope_fields ? fmt_double(*rep.slope_fields) : std::string("exact-zero-column")));
    csv.comment("slope_stress = " + (rep.slope_stress ? fmt_double(*rep.slope_stress) : std::string("exact-zero-column")));
    if (rep.fit_fields) csv.comment("intercept_fields = " + fmt_double(rep.fit_fields->intercept));
    if (rep.fit_stress) csv.comment("intercept_stress = " + fmt_double(rep.fit_stress->intercept));
    csv.comment("K = " + fmt_double(rep.K));
    csv.comment("K_prime = " + fmt_double(rep.K_prime));
    csv.comment("ratio_fields = " + fmt_double(rep.ratio_fields));
    csv.comment("ratio_stress = " + fmt_double(rep.ratio_stress));
    {
        std::string cs;
        for (size_t i = 0; i < rep.rows.size(); ++i)
            cs += (i ? "," : "") + fmt_double(rep.rows[i].gronwall_c);
        csv.comment("gronwall_C_per_eps = " + cs);
        csv.comment("gronwall_ratio = " + fmt_double(rep.ratio_gronwall));
    }
    csv.comment(std::string("verdict_fields = ") + (rep.ratio_fields <= 3.0 ? "PASS" : "FAIL"));
    csv.comment(std::string("verdict_stress = ") + (rep.ratio_stress <= 3.0 ? "PASS" : "FAIL"));
    csv.comment(std::string("verdict_gronwall = ") + (rep.ratio_gronwall <= 5.0 ? "PASS" : "FAIL"));

    CsvWriter plot(artifact_path(out_dir, "sweep_loglog.csv"));
    plot.comment("log-log points for rate plots");
    plot.provenance(cfg.resolved());
    plot.row({"log_eps", "log_sup_E_fields", "log_sup_E_stress"});
    for (const SweepRow& r : rep.rows)
        plot.row({fmt_double(std::log(r.eps)), fmt_double(std::log(r.sup_e_fields)),
                  fmt_double(std::log(r.sup_e_stress))});

    if (rep.any_abort) {
        std::cerr << "sweep: at least one epsilon run aborted\n";
        return 3;
    }
    return 0;
}

int run_check_identities(const RunConfig& cfg, const std::string& out_dir) {
    const TorusGrid grid(cfg.grid_n);
    Rng rng(cfg.seed);
    const int kmax = grid.dealias_cutoff();
    const auto alphas = multi_indices_up_to(cfg.s);
    constexpr int kSets = 50;
    constexpr double kTol = 1e-10;

    CsvWriter csv(artifact_path(out_dir, "identities.csv"));
    csv.comment("integration-by-parts cancellation identities on random band-limited fields");
    csv.provenance(cfg.resolved());
    csv.row({"set", "alpha1", "alpha2", "alpha3", "residual_stress_identity", "residual_scalar_identity"});

    double worst = 0.0;
    for (int set = 0; set < kSets; ++set) {
        PackedStress s1(grid);
        for (auto* f : s1.entries()) *f = random_band_limited(grid, rng, kmax, 1.0);
        const ScalarField s2 = random_band_limited(grid, rng, kmax, 1.0);
        const VectorField u{random_band_limited(grid, rng, kmax, 1.0),
                            random_band_limited(grid, rng, kmax, 1.0),
                            random_band_limited(grid, rng, kmax, 1.0)};
        for (const MultiIndex& a : alphas) {
            const CancellationResiduals r = cancellation_check(s1, s2, u, a);
            worst = std::max({worst, r.stress_identity, r.scalar_identity});
            csv.row({std::to_string(set), std::to_string(a[0]), std::to_string(a[1]), std::to_string(a[2]),
                     fmt_double(r.stress_identity), fmt_double(r.scalar_identity)});
        }
    }
    csv.comment("worst_residual = " + fmt_double(worst));
    csv.comment(std::string("verdict = ") + (worst <= kTol ? "PASS" : "FAIL"));
    if (worst > kTol) {
        std::cerr << "check-identities: worst residual " << worst << " exceeds " << kTol << "\n";
        return 4;
    }
    return 0;
}

int run_check_symmetrizer(const RunConfig& cfg, const std::string& out_dir) {
    const PhysParams p = cfg.params();
    constexpr int kSamples = 100;
    const SymmetrizerReport rep = check_symmetrizable(p, kSamples, cfg.seed);

    CsvWriter csv(artifact_path(out_dir, "symmetrizer_report.csv"));
    csv.comment("random admissible states and unit directions; transformed flux symmetry");
    csv.provenance(cfg.resolved());
    csv.row({"sample", "max_asymmetry", "min_eigenvalue"});
    for (size_t i = 0; i < rep.samples.size(); ++i)
        csv.row({std::to_string(i), fmt_double(rep.samples[i].max_asymmetry_rel),
                 fmt_double(rep.samples[i].min_A0)});
    csv.comment("worst_asymmetry = " + fmt_double(rep.worst_asymmetry));
    csv.comment("min_A0_transformed = " + fmt_double(rep.min_A0_transformed));
    csv.comment("min_damping_transformed = " + fmt_double(rep.min_B_transformed));
    const bool ok = rep.symmetric_ok && rep.positivity_ok && rep.damping_psd_ok;
    csv.comment(std::string("verdict = ") + (ok ? "PASS" : "FAIL"));

    // Cross-check table: assembled stress-coupling blocks against the
    // independently tabulated ones, for the three axis directions.
    CsvWriter blocks(artifact_path(out_dir, "blocks_comparison.csv"));
    blocks.comment("assembled vs tabulated stress-coupling blocks");
    blocks.provenance(cfg.resolved());
    blocks.row({"xi_axis", "block", "row", "col", "assembled", "tabulated", "diff"});
    for (int axis = 0; axis < 3; ++axis) {
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        xi[static_cast<size_t>(axis)] = 1.0;
        StatePoint rest;
        const Mat10 A = assemble_Aj(rest, p, xi);
        const auto C = tabulated_block_C(xi);
        const auto D = tabulated_block_D(xi);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 5; ++j) {
                const double a = A[1 + i][4 + j];
                const double t = C[static_cast<size_t>(i)][static_cast<size_t>(j)];
                blocks.row({std::to_string(axis + 1), "C", std::to_string(i + 1), std::to_string(j + 1),
                            fmt_double(a), fmt_double(t), fmt_double(a - t)});
            }
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 3; ++j) {
                const double a = A[4 + i][1 + j];
                const double t = D[static_cast<size_t>(i)][static_cast<size_t>(j)];
                blocks.row({std::to_string(axis + 1), "D", std::to_string(i + 1), std::to_string(j + 1),
                            fmt_double(a), fmt_double(t), fmt_double(a - t)});
            }
    }

    if (!ok) {
        std::cerr << "check-symmetrizer: symmetry/positivity assertion failed\n";
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral laboratory for a relaxed compressible system and its incompressible limit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (default: out)");
        sub->add_option("--seed", seed_override, "override the config seed");
    };

    CLI::App* cmd_simulate = app.add_subcommand("simulate", "integrate the relaxed system");
    CLI::App* cmd_reference = app.add_subcommand("reference", "incompressible reference solver");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "epsilon sweep of the error norms");
    CLI::App* cmd_identities = app.add_subcommand("check-identities", "cancellation identity residuals");
    CLI::App* cmd_symmetrizer = app.add_subcommand("check-symmetrizer", "flux symmetry verification");
    for (CLI::App* c : {cmd_simulate, cmd_reference, cmd_sweep, cmd_identities, cmd_symmetrizer})
        add_common(c);

    CLI11_PARSE(app, argc, argv);

    try {
        machlimit::RunConfig cfg = machlimit::load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        cfg.validate();
        if (cmd_simulate->parsed()) return run_simulate(cfg, out_dir);
        if (cmd_reference->parsed()) return run_reference(cfg, out_dir);
        if (cmd_sweep->parsed()) return run_sweep(cfg, out_dir);
        if (cmd_identities->parsed()) return run_check_identities(cfg, out_dir);
        if (cmd_symmetrizer->parsed()) return run_check_symmetrizer(cfg, out_dir);
        std::cerr << "no command selected\n";
        return 2;
    } catch (const machlimit::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const machlimit::StateSpaceViolation& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const machlimit::CheckFailure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
