#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "machlimit/params.hpp"
#include "machlimit/rng.hpp"
#include "machlimit/state.hpp"

namespace machlimit {

// First-order unknown ordering: (eta, u1, u2, u3, a11, a12, a13, a22, a23, s2).
inline constexpr int kSysDim = 10;
using Mat10 = std::array<std::array<double, kSysDim>, kSysDim>;
using Vec10 = std::array<double, kSysDim>;

inline Mat10 zero_mat10() {
    Mat10 m{};
    return m;
}

inline Mat10 matmul(const Mat10& a, const Mat10& b) {
    Mat10 c = zero_mat10();
    for (int i = 0; i < kSysDim; ++i)
        for (int k = 0; k < kSysDim; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (int j = 0; j < kSysDim; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

inline Vec10 matvec(const Mat10& a, const Vec10& x) {
    Vec10 y{};
    for (int i = 0; i < kSysDim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < kSysDim; ++j) acc += a[i][j] * x[j];
        y[i] = acc;
    }
    return y;
}

// Point values of the fields entering the coefficient matrices.
struct StatePoint {
    double eta = 0.0;
    double phi = 0.0;
    std::array<double, 3> u{0.0, 0.0, 0.0};
};

namespace detail {
inline void require_in_region(double eta, double phi, double epsilon) {
    if (!(1.0 + epsilon * eta > 0.0) || !(1.0 + epsilon * phi > 0.0))
        throw ValidationError("state point outside the admissible region (vacuum)");
}
}  // namespace detail

// Diagonal of the symmetrizer weight in the original stress variables.
inline Vec10 assemble_A0(double eta, double phi, const PhysParams& p) {
    detail::require_in_region(eta, phi, p.epsilon);
    const double rho = 1.0 + p.epsilon * eta;
    const double theta = 1.0 + p.epsilon * phi;
    const double shear = p.tau1_eps / p.mu_eps;
    return {theta / rho, rho,  rho,  rho,  0.75 * shear,
            shear,       shear, 0.75 * shear, shear, p.tau2_eps / p.lambda_eps};
}

// Constant damping diagonal pairing with assemble_A0.
inline Vec10 damping_B(const PhysParams& p) {
    const double m = 1.0 / p.mu_eps;
    return {0.0, 0.0, 0.0, 0.0, 0.75 * m, m, m, 0.75 * m, m, 1.0 / p.lambda_eps};
}

// Flux matrix sum_j A_j xi_j, assembled from the weighted transport and
// stress-coupling terms of the governing equations.
inline Mat10 assemble_Aj(const StatePoint& pt, const PhysParams& p, const std::array<double, 3>& xi) {
    detail::require_in_region(pt.eta, pt.phi, p.epsilon);
    const double eps = p.epsilon;
    const double rho = 1.0 + eps * pt.eta;
    const double theta = 1.0 + eps * pt.phi;
    const double uxi = pt.u[0] * xi[0] + pt.u[1] * xi[1] + pt.u[2] * xi[2];

    Mat10 A = zero_mat10();
    // Mass row, weighted by theta/rho.
    A[0][0] = theta / rho * uxi;
    for (int i = 0; i < 3; ++i) A[0][1 + i] = theta / eps * xi[i];
    // Momentum rows: acoustic coupling, advection, stress divergence, s2 gradient.
    for (int i = 0; i < 3; ++i) {
        A[1 + i][0] = theta / eps * xi[i];
        A[1 + i][1 + i] = rho * uxi;
        A[1 + i][9] = -xi[i];
        A[9][1 + i] = -xi[i];
    }
    // -div S1 expressed through the packed entries:
    //   row u1: -(d1 a11 + d2 a12 + d3 a13)
    //   row u2: -(d1 a12 + d2 a22 + d3 a23)
    //   row u3: -(d1 a13 + d2 a23 - d3 a11 - d3 a22)
    A[1][4] = -xi[0]; A[1][5] = -xi[1]; A[1][6] = -xi[2];
    A[2][5] = -xi[0]; A[2][7] = -xi[1]; A[2][8] = -xi[2];
    A[3][4] = xi[2];  A[3][6] = -xi[0]; A[3][7] = xi[2];  A[3][8] = -xi[1];
    // Stress production rows, carrying the same weights as assemble_A0:
    // rows a11/a22 scaled by 3/(4 mu), the off-diagonals by 1/mu.
    A[4][1] = -xi[0];       A[4][2] = 0.5 * xi[1];  A[4][3] = 0.5 * xi[2];
    A[5][1] = -xi[1];       A[5][2] = -xi[0];
    A[6][1] = -xi[2];                               A[6][3] = -xi[0];
    A[7][1] = 0.5 * xi[0];  A[7][2] = -xi[1];       A[7][3] = 0.5 * xi[2];
    A[8][2] = -xi[2];       A[8][3] = -xi[1];
    return A;
}

// Hand-tabulated stress-coupling blocks kept as an independent cross-check of
// the assembled flux.  Rows of C pair with momentum components, columns with
// (a11, a12, a13, a22, a23); D is the production-side counterpart.
inline std::array<std::array<double, 5>, 3> tabulated_block_C(const std::array<double, 3>& xi) {
    return {{{-xi[0], -xi[1], -xi[2], 0.0, 0.0},
             {0.0, -xi[0], 0.0, -xi[1], -xi[2]},
             {xi[2], 0.0, -xi[0], xi[2], -xi[1]}}};
}

inline std::array<std::array<double, 3>, 5> tabulated_block_D(const std::array<double, 3>& xi) {
    return {{{-xi[0], 0.5 * xi[1], 0.5 * xi[2]},
             {-xi[1], -xi[0], 0.0},
             {-xi[2], 0.0, -xi[0]},
             {0.5 * xi[0], -xi[1], 0.5 * xi[2]},
             {0.0, -xi[2], -xi[1]}}};
}

// Change of stress variables b11 = (a11+a22)/2, b22 = (a11-a22)/2 together
// with the row recombination that restores symmetry of the flux matrices.
// System matrices transform as A -> M A T with T the variable substitution
// (a11, a22) = (b11+b22, b11-b22) and M the equation recombination.
struct BTransform {
    static std::array<double, 2> forward_vars(double a11, double a22) {
        return {0.5 * (a11 + a22), 0.5 * (a11 - a22)};
    }
    static std::array<double, 2> inverse_vars(double b11, double b22) {
        return {b11 + b22, b11 - b22};
    }

    static Mat10 matrix_T() {
        Mat10 t = zero_mat10();
        for (int i = 0; i < kSysDim; ++i) t[i][i] = 1.0;
        t[4][4] = 1.0; t[4][7] = 1.0;   // a11 = b11 + b22
        t[7][4] = 1.0; t[7][7] = -1.0;  // a22 = b11 - b22
        return t;
    }
    static Mat10 matrix_T_inverse() {
        Mat10 t = zero_mat10();
        for (int i = 0; i < kSysDim; ++i) t[i][i] = 1.0;
        t[4][4] = 0.5; t[4][7] = 0.5;
        t[7][4] = 0.5; t[7][7] = -0.5;
        return t;
    }
    static Mat10 matrix_M() {
        Mat10 m = zero_mat10();
        for (int i = 0; i < kSysDim; ++i) m[i][i] = 1.0;
        m[4][4] = 2.0; m[4][7] = 2.0;                   // b11 row = 2(a11 row + a22 row)
        m[7][4] = 2.0 / 3.0; m[7][7] = -2.0 / 3.0;      // b22 row = (2/3)(a11 row - a22 row)
        return m;
    }
    static Mat10 matrix_M_inverse() {
        Mat10 m = zero_mat10();
        for (int i = 0; i < kSysDim; ++i) m[i][i] = 1.0;
        m[4][4] = 0.25; m[4][7] = 0.75;
        m[7][4] = 0.25; m[7][7] = -0.75;
        return m;
    }
};

inline Mat10 apply_b_transform(const Mat10& a) {
    return matmul(BTransform::matrix_M(), matmul(a, BTransform::matrix_T()));
}

inline Mat10 apply_b_transform_inverse(const Mat10& a) {
    return matmul(BTransform::matrix_M_inverse(), matmul(a, BTransform::matrix_T_inverse()));
}

inline Vec10 transformed_diagonal(const Vec10& diag) {
    Mat10 a = zero_mat10();
    for (int i = 0; i < kSysDim; ++i) a[i][i] = diag[i];
    const Mat10 t = apply_b_transform(a);
    Vec10 out{};
    for (int i = 0; i < kSysDim; ++i) out[i] = t[i][i];
    return out;
}

// Source vector of the first-order subsystem at a point; grad_phi is the
// local temperature-perturbation gradient.
inline Vec10 source_F(double eta, const std::array<double, 3>& grad_phi, const PhysParams& p) {
    Vec10 f{};
    const double c = -(1.0 + p.epsilon * eta) / p.epsilon;
    for (int i = 0; i < 3; ++i) f[1 + i] = c * grad_phi[i];
    return f;
}

// Right-hand side of the companion parabolic temperature equation at a point.
// stress_contraction = (S1 + S2 I) : grad u, u_dot_grad_phi = u . grad phi.
inline double parabolic_H(double eta, double phi, double div_u, double stress_contraction,
                          double u_dot_grad_phi, const PhysParams& p) {
    const double eps = p.epsilon;
    const double rho = 1.0 + eps * eta;
    const double theta = 1.0 + eps * phi;
    return eps * stress_contraction - (p.gamma - 1.0) / eps * theta * rho * div_u - rho * u_dot_grad_phi;
}

struct SymmetrizerSample {
    double max_asymmetry_rel = 0.0;  // of the transformed flux
    double min_A0 = 0.0;             // smallest diagonal entry, original variables
    double min_A0_transformed = 0.0;
    double min_B_transformed = 0.0;
};

struct SymmetrizerReport {
    std::vector<SymmetrizerSample> samples;
    double worst_asymmetry = 0.0;
    double min_A0 = 1e300;
    double min_A0_transformed = 1e300;
    double min_B_transformed = 1e300;
    bool symmetric_ok = true;    // worst asymmetry <= 1e-12 relative
    bool positivity_ok = true;   // transformed A0 diagonal > 0
    bool damping_psd_ok = true;  // transformed damping diagonal >= 0
};

// Sample random admissible state points and unit directions; verify that the
// transformed system is symmetric with positive-definite weight.
inline SymmetrizerReport check_symmetrizable(const PhysParams& p, int samples, std::uint64_t seed,
                                             const StateSpaceBounds& b = StateSpaceBounds()) {
    if (samples < 1) throw ValidationError("check_symmetrizable: need at least one sample");
    Rng rng(seed);
    SymmetrizerReport rep;
    rep.samples.reserve(static_cast<size_t>(samples));
    for (int sidx = 0; sidx < samples; ++sidx) {
        StatePoint pt;
        // Draw 1+eps*eta and 1+eps*phi inside the region with a safety gap.
        pt.eta = (rng.uniform(b.delta_G + 0.1, 1.9) - 1.0) / p.epsilon;
        pt.phi = (rng.uniform(b.delta_G + 0.1, 1.9) - 1.0) / p.epsilon;
        for (int i = 0; i < 3; ++i) pt.u[static_cast<size_t>(i)] = rng.uniform(-2.0, 2.0);
        const std::array<double, 3> xi = rng.unit_vector();

        const Mat10 flux = assemble_Aj(pt, p, xi);
        const Mat10 tflux = apply_b_transform(flux);
        double max_abs = 0.0, max_asym = 0.0;
        for (int i = 0; i < kSysDim; ++i)
            for (int j = 0; j < kSysDim; ++j) {
                max_abs = std::max(max_abs, std::abs(tflux[i][j]));
                max_asym = std::max(max_asym, std::abs(tflux[i][j] - tflux[j][i]));
            }
        SymmetrizerSample row;
        row.max_asymmetry_rel = max_abs > 0.0 ? max_asym / max_abs : 0.0;

        const Vec10 a0 = assemble_A0(pt.eta, pt.phi, p);
        const Vec10 a0t = transformed_diagonal(a0);
        const Vec10 bt = transformed_diagonal(damping_B(p));
        row.min_A0 = *std::min_element(a0.begin(), a0.end());
        row.min_A0_transformed = *std::min_element(a0t.begin(), a0t.end());
        row.min_B_transformed = *std::min_element(bt.begin(), bt.end());

        rep.worst_asymmetry = std::max(rep.worst_asymmetry, row.max_asymmetry_rel);
        rep.min_A0 = std::min(rep.min_A0, row.min_A0);
        rep.min_A0_transformed = std::min(rep.min_A0_transformed, row.min_A0_transformed);
        rep.min_B_transformed = std::min(rep.min_B_transformed, row.min_B_transformed);
        rep.samples.push_back(row);
    }
    rep.symmetric_ok = rep.worst_asymmetry <= 1e-12;
    rep.positivity_ok = rep.min_A0_transformed > 0.0 && rep.min_A0 > 0.0;
    rep.damping_psd_ok = rep.min_B_transformed >= 0.0;
    return rep;
}

}  // namespace machlimit
