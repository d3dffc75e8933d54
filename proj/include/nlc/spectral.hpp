#ifndef NLC_SPECTRAL_HPP
#define NLC_SPECTRAL_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fft.hpp"

namespace nlc {

enum class Axis { x, y };

// ---------------------------------------------------------------------------
// Operators acting on half-plane spectra. Everything downstream that needs
// several derivatives of the same field works at this level to avoid
// redundant transforms.
// ---------------------------------------------------------------------------

namespace spectral {

inline int frequency(const GridSpec& g, Axis axis, int row, int col)
{
    return axis == Axis::x ? g.kx(col) : g.ky(row);
}

/// Multiplies every coefficient by (i 2 pi k_axis)^order. Odd orders zero the
/// Nyquist coefficient of that axis.
inline Spectrum derivative(const Spectrum& s, Axis axis, int order)
{
    if (order < 1) throw std::invalid_argument("derivative: order must be >= 1");
    const GridSpec& g = s.grid;
    Spectrum out(g);
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            const int k = frequency(g, axis, r, c);
            if (order % 2 == 1 && g.is_nyquist(k)) continue;
            cplx m{1.0, 0.0};
            const cplx ik{0.0, two_pi * k};
            for (int p = 0; p < order; ++p) m *= ik;
            out(r, c) = m * s(r, c);
        }
    }
    return out;
}

inline double wavenumber_sq(const GridSpec& g, int row, int col)
{
    const double kx = two_pi * g.kx(col);
    const double ky = two_pi * g.ky(row);
    return kx * kx + ky * ky;
}

inline Spectrum laplacian(const Spectrum& s)
{
    const GridSpec& g = s.grid;
    Spectrum out(g);
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) out(r, c) = -wavenumber_sq(g, r, c) * s(r, c);
    }
    return out;
}

inline bool above_cutoff(const GridSpec& g, int row, int col)
{
    // two-thirds rule: keep max(|kx|, |ky|) <= n/3
    const int k = std::max(std::abs(g.kx(col)), std::abs(g.ky(row)));
    return 3 * k > g.n();
}

inline void dealias_in_place(Spectrum& s)
{
    const GridSpec& g = s.grid;
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            if (above_cutoff(g, r, c)) s(r, c) = 0.0;
        }
    }
}

/** Helmholtz projection onto divergence-free, zero-mean fields.
 *
 * Uses the first-derivative wavenumbers, so a Nyquist frequency counts as 0.
 * This keeps the result Hermitian and makes the projection exact for the
 * discrete divergence; a mode that is Nyquist on both axes is removed.
 */
inline void leray_in_place(Spectrum& ux, Spectrum& uy)
{
    const GridSpec& g = ux.grid;
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            const double kx = g.is_nyquist(g.kx(c)) ? 0 : g.kx(c);
            const double ky = g.is_nyquist(g.ky(r)) ? 0 : g.ky(r);
            const double k2 = kx * kx + ky * ky;
            if (k2 == 0.0) {
                ux(r, c) = 0.0;
                uy(r, c) = 0.0;
                continue;
            }
            const cplx dot = (kx * ux(r, c) + ky * uy(r, c)) / k2;
            ux(r, c) -= kx * dot;
            uy(r, c) -= ky * dot;
        }
    }
}

/// Spectral divergence i k . u with the odd-order Nyquist convention.
inline Spectrum divergence(const Spectrum& ux, const Spectrum& uy)
{
    return derivative(ux, Axis::x, 1) + derivative(uy, Axis::y, 1);
}

/// Squared H^s norm, weight (1 + |2 pi k|^2)^s over the full frequency plane.
inline double sobolev_norm_sq(const Spectrum& s, double order)
{
    const GridSpec& g = s.grid;
    double sum = 0.0;
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            const double w = order == 0.0 ? 1.0 : std::pow(1.0 + wavenumber_sq(g, r, c), order);
            sum += column_weight(g, c) * w * std::norm(s(r, c));
        }
    }
    return sum;
}

/// Full-plane inner product sum_k conj(a_k) b_k, real part.
inline double inner(const Spectrum& a, const Spectrum& b)
{
    const GridSpec& g = a.grid;
    double sum = 0.0;
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            sum += column_weight(g, c) * std::real(std::conj(a(r, c)) * b(r, c));
        }
    }
    return sum;
}

inline double max_magnitude(const Spectrum& s)
{
    double m = 0.0;
    for (const auto& z : s.c) m = std::max(m, std::abs(z));
    return m;
}

} // namespace spectral

// ---------------------------------------------------------------------------
// Physical-space operators.
// ---------------------------------------------------------------------------

inline ScalarField derivative(const ScalarField& f, Axis axis, int order)
{
    return inverse(spectral::derivative(forward(f), axis, order));
}

inline VectorField2 gradient(const ScalarField& f)
{
    const Spectrum s = forward(f);
    return {inverse(spectral::derivative(s, Axis::x, 1)), inverse(spectral::derivative(s, Axis::y, 1))};
}

inline ScalarField laplacian(const ScalarField& f)
{
    return inverse(spectral::laplacian(forward(f)));
}

inline VectorField2 laplacian(const VectorField2& u)
{
    return {laplacian(u[0]), laplacian(u[1])};
}

inline ScalarField divergence(const VectorField2& u)
{
    return inverse(spectral::divergence(forward(u[0]), forward(u[1])));
}

/// Row-wise divergence, (div T)_i = sum_j d_j T_ij.
inline VectorField2 divergence_tensor(const TensorField2& t)
{
    VectorField2 out;
    for (int i = 0; i < 2; ++i) {
        const Spectrum s = spectral::derivative(forward(t(i, 0)), Axis::x, 1) +
                           spectral::derivative(forward(t(i, 1)), Axis::y, 1);
        out[i] = inverse(s);
    }
    return out;
}

inline VectorField2 leray_project(const VectorField2& u)
{
    Spectrum sx = forward(u[0]);
    Spectrum sy = forward(u[1]);
    spectral::leray_in_place(sx, sy);
    return {inverse(sx), inverse(sy)};
}

inline ScalarField dealias(const ScalarField& f)
{
    Spectrum s = forward(f);
    spectral::dealias_in_place(s);
    return inverse(s);
}

inline VectorField2 dealias(const VectorField2& u)
{
    return {dealias(u[0]), dealias(u[1])};
}

inline double sobolev_norm(const ScalarField& f, double s)
{
    if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: order must be nonnegative");
    return std::sqrt(spectral::sobolev_norm_sq(forward(f), s));
}

inline double sobolev_norm(const VectorField2& u, double s)
{
    if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: order must be nonnegative");
    return std::sqrt(spectral::sobolev_norm_sq(forward(u[0]), s) + spectral::sobolev_norm_sq(forward(u[1]), s));
}

/// Largest coefficient magnitude of the spectral divergence.
inline double max_spectral_divergence(const VectorField2& u)
{
    return spectral::max_magnitude(spectral::divergence(forward(u[0]), forward(u[1])));
}

} // namespace nlc

#endif // NLC_SPECTRAL_HPP
