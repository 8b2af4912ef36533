#pragma once

#include <functional>
#include <string>

#include "machlimit/errors.hpp"

namespace machlimit {

// Normalized coefficients of the relaxed system at reference Mach number
// epsilon, together with their vanishing-epsilon limits.
struct PhysParams {
    double epsilon = 0.1;  // in (0,1)
    double gamma = 5.0 / 3.0;
    double mu_eps = 0.1;
    double lambda_eps = 0.1;
    double kappa_eps = 0.1;
    double tau1_eps = 0.1;
    double tau2_eps = 0.1;
    double mu_bar = 0.1;
    double lambda_bar = 0.1;
    double kappa_bar = 0.1;

    // Specific heat for the polytropic gas with gas constant 1.
    double c_v() const { return 1.0 / (gamma - 1.0); }
};

using TauRule = std::function<double(double)>;

inline double tau_rule_linear(double eps) { return eps; }
inline double tau_rule_sqrt(double eps) { return std::sqrt(eps); }

// Build parameters for one epsilon.  The normalized viscosities and heat
// conductivity are held at their limit values; only the relaxation times
// shrink with epsilon (default rule tau = epsilon).
inline PhysParams scaled_params(double epsilon, double mu_bar, double lambda_bar, double kappa_bar,
                                double gamma, const TauRule& tau_rule = tau_rule_linear) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("epsilon must lie in (0,1), got " + std::to_string(epsilon));
    if (!(gamma > 1.0)) throw ValidationError("gamma must exceed 1, got " + std::to_string(gamma));
    if (!(mu_bar > 0.0 && lambda_bar > 0.0 && kappa_bar > 0.0))
        throw ValidationError("mu_bar, lambda_bar, kappa_bar must be positive");
    const double tau = tau_rule(epsilon);
    if (!(tau > 0.0)) throw ValidationError("tau rule produced a non-positive relaxation time");
    PhysParams p;
    p.epsilon = epsilon;
    p.gamma = gamma;
    p.mu_eps = mu_bar;
    p.lambda_eps = lambda_bar;
    p.kappa_eps = kappa_bar;
    p.tau1_eps = tau;
    p.tau2_eps = tau;
    p.mu_bar = mu_bar;
    p.lambda_bar = lambda_bar;
    p.kappa_bar = kappa_bar;
    return p;
}

}  // namespace machlimit
