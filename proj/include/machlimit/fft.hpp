#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "machlimit/field.hpp"
#include "machlimit/grid.hpp"

namespace machlimit {

// Half-complex (r2c) spectrum of a real field.  Coefficients are normalized
// so that f(x) = sum_k c_k exp(i k.x); the last axis stores k3 = 0..n/2 and
// the conjugate modes are implicit.
class Spectrum {
  public:
    Spectrum() = default;
    explicit Spectrum(const TorusGrid& grid)
        : grid_(grid), c_(static_cast<size_t>(grid.spectral_size())) {}

    const TorusGrid& grid() const { return grid_; }
    long size() const { return static_cast<long>(c_.size()); }
    std::complex<double>* data() { return c_.data(); }
    const std::complex<double>* data() const { return c_.data(); }
    std::complex<double>& operator[](long i) { return c_[static_cast<size_t>(i)]; }
    const std::complex<double>& operator[](long i) const { return c_[static_cast<size_t>(i)]; }

    long index(int i1, int i2, int i3) const {
        const int n = grid_.n();
        return (static_cast<long>(i1) * n + i2) * (n / 2 + 1) + i3;
    }

    // Signed wavenumbers for a flat spectral index.
    std::array<int, 3> wavenumbers(long idx) const {
        const int n = grid_.n();
        const int nc = n / 2 + 1;
        const int i3 = static_cast<int>(idx % nc);
        const long r = idx / nc;
        const int i2 = static_cast<int>(r % n);
        const int i1 = static_cast<int>(r / n);
        return {grid_.wavenumber(i1), grid_.wavenumber(i2), i3};
    }

    // Multiplicity of a stored mode in the full spectrum (2 unless the last
    // axis sits on one of its self-conjugate planes k3 = 0 or k3 = n/2).
    double hermitian_weight(long idx) const {
        const int nc = grid_.n() / 2 + 1;
        const int i3 = static_cast<int>(idx % nc);
        return (i3 == 0 || i3 == grid_.n() / 2) ? 1.0 : 2.0;
    }

  private:
    TorusGrid grid_;
    std::vector<std::complex<double>> c_;
};

// Cached FFTW plans per grid size.  Plans are created once under a lock and
// executed with the new-array interface, which is safe to call concurrently
// on distinct buffers.  FFTW_UNALIGNED keeps plain std::vector storage valid.
class SpectralEngine {
  public:
    static const SpectralEngine& get(int n) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<SpectralEngine>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, std::unique_ptr<SpectralEngine>(new SpectralEngine(n))).first;
        return *it->second;
    }

    Spectrum forward(const ScalarField& f) const {
        Spectrum out(f.grid());
        std::vector<double> scratch(f.data(), f.data() + f.size());
        fftw_execute_dft_r2c(fwd_, scratch.data(), reinterpret_cast<fftw_complex*>(out.data()));
        const double scale = 1.0 / static_cast<double>(f.grid().points());
        for (long i = 0; i < out.size(); ++i) out[i] *= scale;
        return out;
    }

    ScalarField backward(const Spectrum& s) const {
        ScalarField out(s.grid());
        // c2r destroys its input, so hand it a copy.
        std::vector<std::complex<double>> scratch(s.data(), s.data() + s.size());
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
        return out;
    }

    ~SpectralEngine() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    SpectralEngine(const SpectralEngine&) = delete;
    SpectralEngine& operator=(const SpectralEngine&) = delete;

  private:
    explicit SpectralEngine(int n) {
        const long np = static_cast<long>(n) * n * n;
        const long nc = static_cast<long>(n) * n * (n / 2 + 1);
        double* r = fftw_alloc_real(static_cast<size_t>(np));
        fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(nc));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_3d(n, n, n, r, c, flags);
        bwd_ = fftw_plan_dft_c2r_3d(n, n, n, c, r, flags);
        fftw_free(r);
        fftw_free(c);
    }

    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

inline Spectrum to_spectrum(const ScalarField& f) { return SpectralEngine::get(f.grid().n()).forward(f); }
inline ScalarField to_field(const Spectrum& s) { return SpectralEngine::get(s.grid().n()).backward(s); }

}  // namespace machlimit
