#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "machlimit/incompressible.hpp"
#include "machlimit/time_integration.hpp"

namespace machlimit {

// First-order approximation built from the limit solution:
//   eta = eps*pi/2, u = w, phi = eps*pi/2,
//   s1 = mu_eps (grad w + grad w^T), s2 = eps*lambda_eps*pi.
struct ApproxState {
    ScalarField eta_eps;
    VectorField u_eps;
    ScalarField phi_eps;
    PackedStress s1_eps;
    ScalarField s2_eps;
};

inline ApproxState approximate_solution(const IncompressibleState& ref, const PhysParams& p) {
    ApproxState a;
    a.eta_eps = 0.5 * p.epsilon * ref.pi;
    a.phi_eps = a.eta_eps;
    a.u_eps = ref.w;
    PackedStress s1(ref.grid());
    s1.a11 = 2.0 * p.mu_eps * partial(ref.w[0], 0);
    s1.a22 = 2.0 * p.mu_eps * partial(ref.w[1], 1);
    s1.a12 = p.mu_eps * (partial(ref.w[0], 1) + partial(ref.w[1], 0));
    s1.a13 = p.mu_eps * (partial(ref.w[0], 2) + partial(ref.w[2], 0));
    s1.a23 = p.mu_eps * (partial(ref.w[1], 2) + partial(ref.w[2], 1));
    a.s1_eps = std::move(s1);
    a.s2_eps = p.epsilon * p.lambda_eps * ref.pi;
    return a;
}

// Sharpest data compliant with the convergence hypotheses: the error state
// vanishes identically at t = 0.
inline RelaxedState well_prepared_initial(const VectorField& w0, const ScalarField& pi0,
                                          const PhysParams& p, double div_tol = 1e-10) {
    if (l2_norm(divergence(w0)) > div_tol)
        throw ValidationError("well_prepared_initial: w0 is not divergence-free within tolerance");
    IncompressibleState ref;
    ref.w = w0;
    ref.pi = pi0;
    const ApproxState a = approximate_solution(ref, p);
    RelaxedState st;
    st.eta = a.eta_eps;
    st.u = a.u_eps;
    st.phi = a.phi_eps;
    st.s1 = a.s1_eps;
    st.s2 = a.s2_eps;
    return st;
}

// Adds band-limited noise of size c*eps to every component; used to probe
// robustness of the rate measurement to admissible data perturbations.
inline RelaxedState perturb_well_prepared(const RelaxedState& st, const PhysParams& p, double c,
                                          Rng& rng, int kmax = 3) {
    RelaxedState out = st;
    const double amp = c * p.epsilon;
    auto jiggle = [&](ScalarField& f) { f += random_band_limited(f.grid(), rng, kmax, amp); };
    jiggle(out.eta);
    for (int i = 0; i < 3; ++i) jiggle(out.u[static_cast<size_t>(i)]);
    jiggle(out.phi);
    for (auto* f : out.s1.entries()) jiggle(*f);
    jiggle(out.s2);
    return out;
}

// Residual forcings of the approximate solution, one per governing equation.
struct ForcingBundle {
    ScalarField f1;
    VectorField f2;
    ScalarField f3;
    PackedStress f4;
    ScalarField f5;

    double norm(int i, int s) const {
        switch (i) {
            case 1: return sobolev_norm({&f1}, s);
            case 2: return sobolev_norm({&f2[0], &f2[1], &f2[2]}, s);
            case 3: return sobolev_norm({&f3}, s);
            case 4: {
                const ScalarField a33 = -(f4.a11 + f4.a22);
                double sq = sobolev_norm_sq(f4.a11, s) + sobolev_norm_sq(f4.a22, s) +
                            sobolev_norm_sq(a33, s) +
                            2.0 * (sobolev_norm_sq(f4.a12, s) + sobolev_norm_sq(f4.a13, s) +
                                   sobolev_norm_sq(f4.a23, s));
                return std::sqrt(sq);
            }
            case 5: return sobolev_norm({&f5}, s);
            default: throw ValidationError("forcing index must lie in 1..5");
        }
    }
};

// Spectral evaluation of the five forcings:
//   f1 = (eps/2)(pi_t + w.grad pi)
//   f2 = (eps^2 pi/2)(w_t + (w.grad)w + grad pi) - eps*lambda grad pi
//   f3 = (eps/2 + eps^3 pi/4)(pi_t + w.grad pi) - (eps*kappa/2) laplace pi
//   f4 = tau1*mu (grad w_t + (grad w_t)^T)
//   f5 = eps*lambda (tau2 pi_t + pi)
inline ForcingBundle forcings(const ReferenceFrame& fr, const PhysParams& p) {
    const double eps = p.epsilon;
    const IncompressibleState& ref = fr.state;
    const TorusGrid& g = ref.grid();
    ForcingBundle b;

    ScalarField rate = fr.pi_t;  // pi_t + w.grad pi
    {
        ScalarField adv = pointwise_product(ref.w[0], partial(ref.pi, 0));
        adv += pointwise_product(ref.w[1], partial(ref.pi, 1));
        adv += pointwise_product(ref.w[2], partial(ref.pi, 2));
        rate += dealias(adv);
    }
    b.f1 = 0.5 * eps * rate;

    {
        const VectorField adv = detail::convection(ref.w);
        for (int i = 0; i < 3; ++i) {
            const auto si = static_cast<size_t>(i);
            ScalarField mom = fr.w_t[si] + adv[si] + partial(ref.pi, i);
            b.f2[si] = 0.5 * eps * eps * dealias(pointwise_product(ref.pi, mom));
            b.f2[si].add_scaled(-eps * p.lambda_eps, partial(ref.pi, i));
        }
    }

    b.f3 = 0.5 * eps * rate;
    b.f3.add_scaled(0.25 * eps * eps * eps, dealias(pointwise_product(ref.pi, rate)));
    b.f3.add_scaled(-0.5 * eps * p.kappa_eps, laplacian(ref.pi));

    {
        PackedStress f4(g);
        const double c = p.tau1_eps * p.mu_eps;
        f4.a11 = 2.0 * c * partial(fr.w_t[0], 0);
        f4.a22 = 2.0 * c * partial(fr.w_t[1], 1);
        f4.a12 = c * (partial(fr.w_t[0], 1) + partial(fr.w_t[1], 0));
        f4.a13 = c * (partial(fr.w_t[0], 2) + partial(fr.w_t[2], 0));
        f4.a23 = c * (partial(fr.w_t[1], 2) + partial(fr.w_t[2], 1));
        b.f4 = std::move(f4);
    }

    b.f5 = eps * p.lambda_eps * (p.tau2_eps * fr.pi_t + ref.pi);
    return b;
}

// Uniformity table for the forcing bounds: column i holds sup over the probe
// times of ||f_i||_s / eps, one row per epsilon.
struct ForcingBoundTable {
    std::vector<double> eps_list;
    std::vector<std::array<double, 5>> rows;  // ||f_i||_s / eps
    std::array<double, 5> column_ratio{};     // max/min per column
    bool pass = false;                        // every ratio <= 3
};

inline ForcingBoundTable forcing_bound_check(const std::vector<double>& eps_list, const TorusGrid& grid,
                                             int s, double mu_bar, double lambda_bar, double kappa_bar,
                                             double gamma, const TauRule& rule = tau_rule_linear,
                                             const std::vector<double>& times = {0.0, 0.25, 0.5}) {
    if (eps_list.empty()) throw ValidationError("forcing_bound_check: empty epsilon list");
    ForcingBoundTable table;
    table.eps_list = eps_list;
    for (double eps : eps_list) {
        const PhysParams p = scaled_params(eps, mu_bar, lambda_bar, kappa_bar, gamma, rule);
        std::array<double, 5> row{};
        for (double t : times) {
            const ReferenceFrame fr = taylor_green_frame(t, mu_bar, grid);
            const ForcingBundle b = forcings(fr, p);
            for (int i = 1; i <= 5; ++i) {
                const auto idx = static_cast<size_t>(i - 1);
                row[idx] = std::max(row[idx], b.norm(i, s) / eps);
            }
        }
        table.rows.push_back(row);
    }
    table.pass = true;
    for (size_t c = 0; c < 5; ++c) {
        double lo = 1e300, hi = 0.0;
        for (const auto& row : table.rows) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        table.column_ratio[c] = lo > 0.0 ? hi / lo : 1.0;
        if (table.column_ratio[c] > 3.0) table.pass = false;
    }
    return table;
}

// Componentwise differences between a relaxed state and the approximation.
struct ErrorState {
    ScalarField eta_d;
    VectorField u_d;
    ScalarField phi_d;
    PackedStress s1_d;
    ScalarField s2_d;
};

inline ErrorState error_state(const RelaxedState& st, const ApproxState& a) {
    ErrorState e;
    e.eta_d = st.eta - a.eta_eps;
    for (int i = 0; i < 3; ++i)
        e.u_d[static_cast<size_t>(i)] = st.u[static_cast<size_t>(i)] - a.u_eps[static_cast<size_t>(i)];
    e.phi_d = st.phi - a.phi_eps;
    e.s1_d = st.s1 - a.s1_eps;
    e.s2_d = st.s2 - a.s2_eps;
    return e;
}

// Error energy: E^2 = ||(eta_d,u_d,phi_d)||_s^2 + tau1 ||S1_d||_s^2 + tau2 ||S2_d||_s^2,
// with the full nine-entry matrix norm for S1_d.
struct EnergyReport {
    double t = 0.0;
    double e_total = 0.0;
    double e_fields = 0.0;      // ||(eta_d, u_d, phi_d)||_s
    double e_stress_raw = 0.0;  // ||(S1_d, S2_d)||_s, unweighted
    double s1_norm = 0.0;
    double s2_norm = 0.0;
    int s = 0;
    // State-weighted energy at one multi-index, filled by callers that
    // evaluate weighted_energy alongside.
    std::optional<double> e_weighted;
};

inline EnergyReport energy_E(const ErrorState& e, const PhysParams& p, int s) {
    EnergyReport r;
    r.s = s;
    const double fields_sq = sobolev_norm_sq(e.eta_d, s) + sobolev_norm_sq(e.u_d[0], s) +
                             sobolev_norm_sq(e.u_d[1], s) + sobolev_norm_sq(e.u_d[2], s) +
                             sobolev_norm_sq(e.phi_d, s);
    const ScalarField a33 = -(e.s1_d.a11 + e.s1_d.a22);
    const double s1_sq = sobolev_norm_sq(e.s1_d.a11, s) + sobolev_norm_sq(e.s1_d.a22, s) +
                         sobolev_norm_sq(a33, s) +
                         2.0 * (sobolev_norm_sq(e.s1_d.a12, s) + sobolev_norm_sq(e.s1_d.a13, s) +
                                sobolev_norm_sq(e.s1_d.a23, s));
    const double s2_sq = sobolev_norm_sq(e.s2_d, s);
    r.e_fields = std::sqrt(fields_sq);
    r.s1_norm = std::sqrt(s1_sq);
    r.s2_norm = std::sqrt(s2_sq);
    r.e_stress_raw = std::sqrt(s1_sq + s2_sq);
    r.e_total = std::sqrt(fields_sq + p.tau1_eps * s1_sq + p.tau2_eps * s2_sq);
    return r;
}

// Instantaneous weighted energy at one derivative multi-index: the integral
// of the state-weighted quadratic form of the alpha-derivatives of the error.
inline double weighted_energy(const ErrorState& e, const RelaxedState& st, const PhysParams& p,
                              const MultiIndex& alpha) {
    const StateSpaceBounds gb;
    const StateSpaceReport rep = in_state_space(st, p.epsilon, gb);
    if (!rep.ok)
        throw StateSpaceViolation(rep.worst_field,
                                  std::min(rep.margin_density(gb), rep.margin_temperature(gb)),
                                  "weighted_energy: state outside the admissible region");
    const double eps = p.epsilon;
    const ScalarField deta = spectral_derivative(e.eta_d, alpha);
    const ScalarField dphi = spectral_derivative(e.phi_d, alpha);
    const VectorField du{spectral_derivative(e.u_d[0], alpha), spectral_derivative(e.u_d[1], alpha),
                         spectral_derivative(e.u_d[2], alpha)};
    std::array<ScalarField, 5> ds;
    {
        auto entries = e.s1_d.entries();
        for (int c = 0; c < 5; ++c) ds[static_cast<size_t>(c)] = spectral_derivative(*entries[static_cast<size_t>(c)], alpha);
    }
    const ScalarField ds2 = spectral_derivative(e.s2_d, alpha);

    const double ws1 = p.tau1_eps / (2.0 * p.mu_eps);
    const double ws2 = p.tau2_eps / p.lambda_eps;
    double acc = 0.0;
    for (long i = 0; i < deta.size(); ++i) {
        const double rho = 1.0 + eps * st.eta[i];
        const double theta = 1.0 + eps * st.phi[i];
        double v = theta / rho * deta[i] * deta[i];
        v += rho * (du[0][i] * du[0][i] + du[1][i] * du[1][i] + du[2][i] * du[2][i]);
        v += rho / ((p.gamma - 1.0) * theta) * dphi[i] * dphi[i];
        const double a11 = ds[0][i], a12 = ds[1][i], a13 = ds[2][i], a22 = ds[3][i], a23 = ds[4][i];
        const double s1_sq = a11 * a11 + a22 * a22 + (a11 + a22) * (a11 + a22) +
                             2.0 * (a12 * a12 + a13 * a13 + a23 * a23);
        v += ws1 * s1_sq + ws2 * ds2[i] * ds2[i];
        acc += v;
    }
    const double h = deta.grid().dx();
    return acc * h * h * h;
}

// Residuals of the two integration-by-parts identities coupling the stress
// errors with the velocity error.  Both vanish for band-limited fields.
struct CancellationResiduals {
    double stress_identity = 0.0;  // div S1 against u vs. symmetric gradient against S1
    double scalar_identity = 0.0;  // grad S2 against u vs. S2 against div u
};

inline CancellationResiduals cancellation_check(const PackedStress& s1_d, const ScalarField& s2_d,
                                                const VectorField& u_d, const MultiIndex& alpha,
                                                double floor = 1e-30) {
    auto da = [&](const ScalarField& f) { return spectral_derivative(f, alpha); };

    const VectorField div_s1 = stress_divergence(s1_d);
    double lhs1 = 0.0;
    for (int i = 0; i < 3; ++i)
        lhs1 += l2_inner(da(div_s1[static_cast<size_t>(i)]), da(u_d[static_cast<size_t>(i)]));

    std::array<std::array<ScalarField, 3>, 3> grad_u;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            grad_u[static_cast<size_t>(i)][static_cast<size_t>(j)] = partial(u_d[static_cast<size_t>(i)], j);
    const ScalarField div_u = grad_u[0][0] + grad_u[1][1] + grad_u[2][2];
    double rhs1 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ScalarField dij = grad_u[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                              grad_u[static_cast<size_t>(j)][static_cast<size_t>(i)];
            if (i == j) dij.add_scaled(-2.0 / 3.0, div_u);
            rhs1 += 0.5 * l2_inner(da(dij), da(s1_d.component(i, j)));
        }

    double lhs2 = 0.0;
    for (int i = 0; i < 3; ++i) lhs2 += l2_inner(da(partial(s2_d, i)), da(u_d[static_cast<size_t>(i)]));
    const double rhs2 = l2_inner(da(s2_d), da(div_u));

    CancellationResiduals r;
    r.stress_identity = std::abs(lhs1 + rhs1) / std::max({std::abs(lhs1), std::abs(rhs1), floor});
    r.scalar_identity = std::abs(lhs2 + rhs2) / std::max({std::abs(lhs2), std::abs(rhs2), floor});
    return r;
}

// Minimal constant C with  d(E^2)/dt <= C (1+E^2) E^2 + C eps^2  at every
// interior sample (centered differences).  Diagnostic of the differential
// inequality's form, not a proof.
inline double gronwall_diagnostic(const std::vector<double>& times, const std::vector<double>& E,
                                  double epsilon) {
    if (times.size() != E.size() || times.size() < 3)
        throw ValidationError("gronwall_diagnostic: need at least 3 aligned samples");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ValidationError("gronwall_diagnostic: times must strictly increase");
    double c = 0.0;
    for (size_t i = 1; i + 1 < times.size(); ++i) {
        const double dt2 = times[i + 1] - times[i - 1];
        const double e2p = E[i + 1] * E[i + 1], e2m = E[i - 1] * E[i - 1];
        const double deriv = (e2p - e2m) / dt2;
        const double e2 = E[i] * E[i];
        const double denom = (1.0 + e2) * e2 + epsilon * epsilon;
        c = std::max(c, deriv / denom);
    }
    return std::max(c, 0.0);
}

struct SweepSettings {
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    int n = 16;
    int s = 2;
    double T_star = 0.5;
    Scheme scheme = Scheme::relax_exact_split;
    double cfl = 0.5;
    int sample_every = 10;
    double gamma = 5.0 / 3.0;
    double mu_bar = 0.1;
    double lambda_bar = 0.1;
    double kappa_bar = 0.1;
    TauRule tau_rule = tau_rule_linear;
    unsigned threads = 0;            // 0 = hardware concurrency
    bool self_test = false;          // compare the approximation against itself
    double perturbation_c = 0.0;     // optional initial-data noise, size c*eps
    std::uint64_t seed = 42;
};

struct SweepRow {
    double eps = 0.0;
    double sup_e_fields = 0.0;
    double sup_e_stress = 0.0;
    double gronwall_c = 0.0;
    bool aborted = false;
    std::string abort_reason;
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

struct SweepReport {
    SweepSettings settings;
    std::vector<SweepRow> rows;
    std::optional<LogLogFit> fit_fields;  // absent when a column is exactly zero
    std::optional<LogLogFit> fit_stress;
    std::optional<double> slope_fields;   // convenience mirrors of the fits
    std::optional<double> slope_stress;
    double K = 0.0;        // max over eps of sup_t E_fields / eps
    double K_prime = 0.0;  // max over eps of sup_t E_stress / sqrt(eps)
    double ratio_fields = 0.0;
    double ratio_stress = 0.0;
    double ratio_gronwall = 0.0;
    bool any_abort = false;
};

namespace detail {

inline std::optional<LogLogFit> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    for (double v : y)
        if (!(v > 0.0)) return std::nullopt;
    const size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    LogLogFit fit;
    fit.slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
    return fit;
}

inline SweepRow sweep_one_epsilon(double eps, const SweepSettings& cfg) {
    const TorusGrid grid(cfg.n);
    const PhysParams p =
        scaled_params(eps, cfg.mu_bar, cfg.lambda_bar, cfg.kappa_bar, cfg.gamma, cfg.tau_rule);
    SweepRow row;
    row.eps = eps;

    const ReferenceFrame fr0 = taylor_green_frame(0.0, cfg.mu_bar, grid);
    RelaxedState init = well_prepared_initial(fr0.state.w, fr0.state.pi, p);
    if (cfg.perturbation_c > 0.0) {
        Rng rng(cfg.seed);
        init = perturb_well_prepared(init, p, cfg.perturbation_c, rng);
    }

    SimPolicy policy;
    policy.scheme = cfg.scheme;
    policy.cfl = cfg.cfl;
    policy.sample_every = cfg.sample_every;

    std::vector<double> sample_times;
    std::vector<double> e_total_series;

    if (cfg.self_test) {
        // Sampling grid only; the "solution" is the approximation itself.
        const double bound = dt_max(init, p, cfg.scheme, cfg.cfl);
        long n_steps = static_cast<long>(std::ceil(cfg.T_star / bound - 1e-12));
        const long k = std::min<long>(cfg.sample_every, n_steps);
        n_steps = ((n_steps + k - 1) / k) * k;
        const double dt = cfg.T_star / static_cast<double>(n_steps);
        for (long s = 0; s <= n_steps; s += k) {
            const double t = dt * static_cast<double>(s);
            const ReferenceFrame fr = taylor_green_frame(t, cfg.mu_bar, grid);
            const ApproxState a = approximate_solution(fr.state, p);
            RelaxedState same;
            same.eta = a.eta_eps;
            same.u = a.u_eps;
            same.phi = a.phi_eps;
            same.s1 = a.s1_eps;
            same.s2 = a.s2_eps;
            const EnergyReport er = energy_E(error_state(same, a), p, cfg.s);
            row.sup_e_fields = std::max(row.sup_e_fields, er.e_fields);
            row.sup_e_stress = std::max(row.sup_e_stress, er.e_stress_raw);
            sample_times.push_back(t);
            e_total_series.push_back(er.e_total);
        }
    } else {
        const Trajectory traj = simulate(init, p, cfg.T_star, policy);
        if (traj.abort) {
            row.aborted = true;
            row.abort_reason = traj.abort->reason;
        }
        for (size_t i = 0; i < traj.states.size(); ++i) {
            const double t = traj.times[i];
            const ReferenceFrame fr = taylor_green_frame(t, cfg.mu_bar, grid);
            const ApproxState a = approximate_solution(fr.state, p);
            const EnergyReport er = energy_E(error_state(traj.states[i], a), p, cfg.s);
            row.sup_e_fields = std::max(row.sup_e_fields, er.e_fields);
            row.sup_e_stress = std::max(row.sup_e_stress, er.e_stress_raw);
            sample_times.push_back(t);
            e_total_series.push_back(er.e_total);
        }
    }
    if (sample_times.size() >= 3) row.gronwall_c = gronwall_diagnostic(sample_times, e_total_series, eps);
    return row;
}

}  // namespace detail

// Rate verification: for each epsilon run the relaxed system from
// well-prepared data, measure the sup-in-time error norms against the exact
// reference, and fit the observed convergence rates.
inline SweepReport convergence_sweep(const SweepSettings& cfg) {
    if (cfg.eps_list.size() < 3) throw ValidationError("sweep needs at least 3 epsilon values");
    for (size_t i = 1; i < cfg.eps_list.size(); ++i)
        if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]))
            throw ValidationError("sweep epsilon list must be strictly decreasing");
    if (!(cfg.T_star > 0.0)) throw ValidationError("sweep horizon T_star must be positive");

    SweepReport rep;
    rep.settings = cfg;
    rep.rows.resize(cfg.eps_list.size());

    unsigned width = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
    width = std::max(1u, std::min<unsigned>(width, static_cast<unsigned>(cfg.eps_list.size())));
    if (width == 1) {
        for (size_t i = 0; i < cfg.eps_list.size(); ++i)
            rep.rows[i] = detail::sweep_one_epsilon(cfg.eps_list[i], cfg);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(cfg.eps_list.size());
        for (unsigned w = 0; w < width; ++w) {
            pool.emplace_back([&, w]() {
                for (size_t i = w; i < cfg.eps_list.size(); i += width) {
                    try {
                        rep.rows[i] = detail::sweep_one_epsilon(cfg.eps_list[i], cfg);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<double> eps, sup_f, sup_s;
    std::vector<double> norm_f, norm_s, gron;
    for (const SweepRow& row : rep.rows) {
        rep.any_abort = rep.any_abort || row.aborted;
        eps.push_back(row.eps);
        sup_f.push_back(row.sup_e_fields);
        sup_s.push_back(row.sup_e_stress);
        norm_f.push_back(row.sup_e_fields / row.eps);
        norm_s.push_back(row.sup_e_stress / std::sqrt(row.eps));
        if (row.gronwall_c > 0.0) gron.push_back(row.gronwall_c);
    }
    rep.fit_fields = detail::loglog_fit(eps, sup_f);
    rep.fit_stress = detail::loglog_fit(eps, sup_s);
    if (rep.fit_fields) rep.slope_fields = rep.fit_fields->slope;
    if (rep.fit_stress) rep.slope_stress = rep.fit_stress->slope;
    auto ratio = [](const std::vector<double>& v) {
        double lo = 1e300, hi = 0.0;
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        return lo > 0.0 ? hi / lo : 0.0;
    };
    rep.K = *std::max_element(norm_f.begin(), norm_f.end());
    rep.K_prime = *std::max_element(norm_s.begin(), norm_s.end());
    rep.ratio_fields = ratio(norm_f);
    rep.ratio_stress = ratio(norm_s);
    rep.ratio_gronwall = gron.empty() ? 0.0 : ratio(gron);
    return rep;
}

}  // namespace machlimit
