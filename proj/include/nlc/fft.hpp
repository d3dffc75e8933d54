#ifndef NLC_FFT_HPP
#define NLC_FFT_HPP

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "field.hpp"

namespace nlc {

using cplx = std::complex<double>;

/** Half-plane Fourier coefficients of a real field.
 *
 * Normalized so that f(x) = sum_k fhat_k exp(2 pi i k.x); the zero mode is
 * the mean of f and Parseval reads mean(f^2) = sum over the full plane of
 * |fhat_k|^2. Only columns kx in [0, n/2] are stored.
 */
struct Spectrum {
    GridSpec grid;
    std::vector<cplx> c;

    Spectrum() = default;
    explicit Spectrum(const GridSpec& g) : grid(g), c(g.spectral_size(), cplx{0.0, 0.0}) {}

    cplx& operator()(int row, int col) { return c[static_cast<std::size_t>(row) * grid.spectral_cols() + col]; }
    cplx operator()(int row, int col) const { return c[static_cast<std::size_t>(row) * grid.spectral_cols() + col]; }

    Spectrum& operator+=(const Spectrum& o)
    {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
        return *this;
    }
    Spectrum& operator-=(const Spectrum& o)
    {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c[k];
        return *this;
    }
    Spectrum& operator*=(double a)
    {
        for (auto& z : c) z *= a;
        return *this;
    }
};

inline Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
inline Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
inline Spectrum operator*(double s, Spectrum a) { return a *= s; }

/// Multiplicity of a stored column when summing over the full frequency plane.
inline double column_weight(const GridSpec& g, int col)
{
    return (col == 0 || col == g.n() / 2) ? 1.0 : 2.0;
}

namespace detail {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    PlanPair() = default;
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
    ~PlanPair()
    {
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

// The FFTW planner is not thread-safe; execution through the new-array
// interface is. Plans are created once per size under a lock and never
// destroyed before exit. FFTW_ESTIMATE keeps plan choice, and therefore the
// rounding pattern, identical across processes.
inline const PlanPair& plans_for(int n)
{
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<PlanPair>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    auto p = std::make_unique<PlanPair>();
    const std::size_t real_size = static_cast<std::size_t>(n) * n;
    const std::size_t cplx_size = static_cast<std::size_t>(n) * (n / 2 + 1);
    double* rbuf = fftw_alloc_real(real_size);
    fftw_complex* cbuf = fftw_alloc_complex(cplx_size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p->forward = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, flags);
    p->inverse = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, flags);
    fftw_free(rbuf);
    fftw_free(cbuf);
    return *cache.emplace(n, std::move(p)).first->second;
}

} // namespace detail

inline Spectrum forward(const ScalarField& f)
{
    Spectrum out(f.grid);
    const auto& plans = detail::plans_for(f.grid.n());
    // r2c does not modify its input, the const_cast only satisfies the C API.
    fftw_execute_dft_r2c(plans.forward, const_cast<double*>(f.values.data()),
                         reinterpret_cast<fftw_complex*>(out.c.data()));
    const double scale = 1.0 / static_cast<double>(f.grid.size());
    for (auto& z : out.c) z *= scale;
    return out;
}

inline ScalarField inverse(const Spectrum& s)
{
    ScalarField out(s.grid);
    // c2r overwrites its input.
    std::vector<cplx> scratch = s.c;
    const auto& plans = detail::plans_for(s.grid.n());
    fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.values.data());
    return out;
}

} // namespace nlc

#endif // NLC_FFT_HPP
