#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "machlimit/fft.hpp"
#include "machlimit/field.hpp"
#include "machlimit/grid.hpp"
#include "machlimit/rng.hpp"

namespace machlimit {

namespace detail {

// (i k)^a per mode: i^{|a|} * k1^a1 k2^a2 k3^a3, with the Nyquist mode zeroed
// whenever it would receive an odd power (keeps real fields real).
inline std::complex<double> derivative_multiplier(const std::array<int, 3>& k, const MultiIndex& alpha,
                                                  int nyquist) {
    double mag = 1.0;
    for (int j = 0; j < 3; ++j) {
        const int aj = alpha[j];
        if (aj == 0) continue;
        if (std::abs(k[j]) == nyquist && aj % 2 == 1) return {0.0, 0.0};
        mag *= std::pow(static_cast<double>(k[j]), aj);
    }
    switch (alpha.order() % 4) {
        case 0: return {mag, 0.0};
        case 1: return {0.0, mag};
        case 2: return {-mag, 0.0};
        default: return {0.0, -mag};
    }
}

}  // namespace detail

inline void derivative_in_place(Spectrum& s, const MultiIndex& alpha) {
    if (alpha.order() > kMaxDerivativeOrder)
        throw ValidationError("derivative order " + std::to_string(alpha.order()) + " exceeds maximum " +
                              std::to_string(kMaxDerivativeOrder));
    const int nq = s.grid().n() / 2;
    for (long i = 0; i < s.size(); ++i)
        s[i] *= detail::derivative_multiplier(s.wavenumbers(i), alpha, nq);
}

// d^alpha f via Fourier multipliers; exact (to rounding) for band-limited f.
inline ScalarField spectral_derivative(const ScalarField& f, const MultiIndex& alpha) {
    Spectrum s = to_spectrum(f);
    derivative_in_place(s, alpha);
    return to_field(s);
}

inline ScalarField partial(const ScalarField& f, int axis) {
    MultiIndex a;
    a.a[static_cast<size_t>(axis)] = 1;
    return spectral_derivative(f, a);
}

inline ScalarField laplacian(const ScalarField& f) {
    Spectrum s = to_spectrum(f);
    for (long i = 0; i < s.size(); ++i) {
        const auto k = s.wavenumbers(i);
        s[i] *= -static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }
    return to_field(s);
}

inline void dealias_in_place(Spectrum& s) {
    const int cut = s.grid().dealias_cutoff();
    for (long i = 0; i < s.size(); ++i) {
        const auto k = s.wavenumbers(i);
        if (std::abs(k[0]) > cut || std::abs(k[1]) > cut || std::abs(k[2]) > cut) s[i] = 0.0;
    }
}

// Two-thirds rule: zero every mode with any |k_j| > n/3.
inline ScalarField dealias(const ScalarField& f) {
    Spectrum s = to_spectrum(f);
    dealias_in_place(s);
    return to_field(s);
}

// Quadrature of int f g dx over [0,2pi]^3; exact for products free of
// aliasing onto the mean mode (always the case for dealiased inputs).
inline double l2_inner(const ScalarField& f, const ScalarField& g) {
    f.check_same_grid(g);
    double acc = 0.0;
    for (long i = 0; i < f.size(); ++i) acc += f[i] * g[i];
    const double h = f.grid().dx();
    return acc * h * h * h;
}

inline double integral(const ScalarField& f) {
    double acc = 0.0;
    for (long i = 0; i < f.size(); ++i) acc += f[i];
    const double h = f.grid().dx();
    return acc * h * h * h;
}

inline double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, l2_inner(f, f))); }

inline double linf_norm(const ScalarField& f) {
    double m = 0.0;
    for (long i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

namespace detail {

// Spectral weight realizing the multi-index Sobolev sum: for each mode k,
// sum over |a| <= s of |(ik)^a|^2 with the same Nyquist convention as the
// derivative operator, so the two evaluation routes agree to rounding.
inline double sobolev_weight(const std::array<int, 3>& k, int s, int nyquist) {
    double total = 0.0;
    for (int a1 = 0; a1 <= s; ++a1) {
        const bool z1 = std::abs(k[0]) == nyquist && a1 % 2 == 1;
        const double p1 = a1 == 0 ? 1.0 : (z1 ? 0.0 : std::pow(static_cast<double>(k[0]), a1));
        for (int a2 = 0; a2 + a1 <= s; ++a2) {
            const bool z2 = std::abs(k[1]) == nyquist && a2 % 2 == 1;
            const double p2 = a2 == 0 ? 1.0 : (z2 ? 0.0 : std::pow(static_cast<double>(k[1]), a2));
            for (int a3 = 0; a3 + a2 + a1 <= s; ++a3) {
                const bool z3 = std::abs(k[2]) == nyquist && a3 % 2 == 1;
                const double p3 = a3 == 0 ? 1.0 : (z3 ? 0.0 : std::pow(static_cast<double>(k[2]), a3));
                const double m = p1 * p2 * p3;
                total += m * m;
            }
        }
    }
    return total;
}

}  // namespace detail

inline double sobolev_norm_sq(const ScalarField& f, int s) {
    if (s < 0 || s > kMaxDerivativeOrder)
        throw ValidationError("Sobolev order s must lie in [0, " + std::to_string(kMaxDerivativeOrder) + "]");
    const Spectrum sp = to_spectrum(f);
    const int nq = f.grid().n() / 2;
    double acc = 0.0;
    for (long i = 0; i < sp.size(); ++i)
        acc += sp.hermitian_weight(i) * detail::sobolev_weight(sp.wavenumbers(i), s, nq) * std::norm(sp[i]);
    return acc * kTwoPi * kTwoPi * kTwoPi;
}

// H^s norm of a tuple of component fields: sqrt of the summed squares.
inline double sobolev_norm(const std::vector<const ScalarField*>& fields, int s) {
    double acc = 0.0;
    const TorusGrid* g = nullptr;
    for (const ScalarField* f : fields) {
        if (g && !(f->grid() == *g)) throw ValidationError("sobolev_norm: fields live on different grids");
        g = &f->grid();
        acc += sobolev_norm_sq(*f, s);
    }
    return std::sqrt(acc);
}

// Smooth random field with spectrum confined to |k_j| <= kmax, scaled to the
// requested sup-norm.  Deterministic for a given generator stream.
inline ScalarField random_band_limited(const TorusGrid& grid, Rng& rng, int kmax, double amplitude) {
    if (kmax < 1 || kmax > grid.dealias_cutoff())
        throw ValidationError("random_band_limited: kmax must lie in [1, n/3]");
    ScalarField noise(grid);
    for (long i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
    Spectrum s = to_spectrum(noise);
    for (long i = 0; i < s.size(); ++i) {
        const auto k = s.wavenumbers(i);
        const bool keep = std::abs(k[0]) <= kmax && std::abs(k[1]) <= kmax && std::abs(k[2]) <= kmax &&
                          !(k[0] == 0 && k[1] == 0 && k[2] == 0);
        if (!keep) s[i] = 0.0;
    }
    ScalarField out = to_field(s);
    const double sup = linf_norm(out);
    if (sup > 0.0) out *= amplitude / sup;
    return out;
}

}  // namespace machlimit
