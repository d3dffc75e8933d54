#ifndef NLC_INITIAL_HPP
#define NLC_INITIAL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "model.hpp"

namespace nlc {

// Initial-condition presets. All velocity fields returned here are
// divergence-free with zero mean.

inline VectorField2 taylor_green_velocity(const GridSpec& g, double amplitude)
{
    return VectorField2::sample(
        g, [&](double x, double y) { return amplitude * std::sin(two_pi * x) * std::cos(two_pi * y); },
        [&](double x, double y) { return -amplitude * std::cos(two_pi * x) * std::sin(two_pi * y); });
}

inline State taylor_green(const GridSpec& g, double amplitude, std::array<double, 2> director = {1.0, 0.0})
{
    return {taylor_green_velocity(g, amplitude), VectorField2(g, director[0], director[1]), 0.0};
}

inline State constant_director(const GridSpec& g, std::array<double, 2> director)
{
    return {VectorField2(g), VectorField2(g, director[0], director[1]), 0.0};
}

/// d = (cos theta, sin theta), theta = 2 pi (m x + n y) + phase.
inline State mode_director(const GridSpec& g, int m, int n, double phase)
{
    auto theta = [=](double x, double y) { return two_pi * (m * x + n * y) + phase; };
    return {VectorField2(g),
            VectorField2::sample(g, [&](double x, double y) { return std::cos(theta(x, y)); },
                                 [&](double x, double y) { return std::sin(theta(x, y)); }),
            0.0};
}

/** Real scalar with complex-Gaussian coefficients on 0 < |k| <= band
 * (Euclidean), or on k = 0 alone when band is 0 and include_mean is set.
 */
inline ScalarField random_band_limited(const GridSpec& g, double band, bool include_mean, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Spectrum s(g);
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            const double kx = g.kx(c), ky = g.ky(r);
            const double k2 = kx * kx + ky * ky;
            // draw for every stored mode so the stream does not depend on band
            const double re = normal(rng);
            const double im = normal(rng);
            if (k2 == 0.0) {
                if (include_mean) s(r, c) = re;
                continue;
            }
            if (k2 <= band * band && !spectral::above_cutoff(g, r, c)) s(r, c) = cplx{re, im};
        }
    }
    // c2r keeps the Hermitian part; a forward pass is not needed since only
    // physical values are returned.
    return inverse(s);
}

inline VectorField2 random_divergence_free(const GridSpec& g, double band, std::mt19937_64& rng)
{
    VectorField2 u{random_band_limited(g, band, false, rng), random_band_limited(g, band, false, rng)};
    return leray_project(u);
}

struct RandomInit {
    std::uint64_t seed = 0;
    double energy = 1.0;      // requested E(0)
    double band = -1.0;       // < 0 selects n/6
    std::array<double, 2> mean_director{1.0, 0.0};
    bool velocity = true;
    bool director = true;
};

namespace detail {

inline double l2_sq(const VectorField2& u)
{
    return spectral::sobolev_norm_sq(forward(u[0]), 0.0) + spectral::sobolev_norm_sq(forward(u[1]), 0.0);
}

inline double grad_sq(const VectorField2& u)
{
    return spectral::sobolev_norm_sq(forward(u[0]), 1.0) + spectral::sobolev_norm_sq(forward(u[1]), 1.0) - l2_sq(u);
}

} // namespace detail

/** Seeded band-limited random state rescaled to a requested energy.
 *
 * Velocity and director fluctuation are each normalized to unit energy
 * contribution, then a common factor s is found by bisection so that
 * E(v = s v1, d = dbar + s d1) matches the request.
 */
inline State random_state(const GridSpec& g, const ModelParams& p, const RandomInit& init)
{
    p.validate();
    if (!(init.energy >= 0.0)) throw std::invalid_argument("random init: energy must be >= 0");
    const double band = init.band < 0.0 ? g.n() / 6.0 : init.band;
    std::mt19937_64 rng(init.seed);

    VectorField2 v1 = random_divergence_free(g, band, rng);
    VectorField2 d1{random_band_limited(g, band, false, rng), random_band_limited(g, band, false, rng)};
    if (init.velocity) {
        const double kin = 0.5 * detail::l2_sq(v1);
        if (kin > 0.0) v1 *= 1.0 / std::sqrt(kin);
    } else {
        v1 = VectorField2(g);
    }
    if (init.director) {
        const double el = 0.5 * p.lambda * detail::grad_sq(d1);
        if (el > 0.0) d1 *= 1.0 / std::sqrt(el);
    } else {
        d1 = VectorField2(g);
    }
    const VectorField2 dbar(g, init.mean_director[0], init.mean_director[1]);

    auto build = [&](double s) {
        State st{s * v1, dbar + s * d1, 0.0};
        return st;
    };
    auto energy_at = [&](double s) { return energy(build(s), p).total; };

    const double e0 = energy_at(0.0);
    if (init.energy <= e0 || (!init.velocity && !init.director)) return build(0.0);

    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (energy_at(hi) < init.energy) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("random init: cannot reach requested energy");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (energy_at(mid) < init.energy ? lo : hi) = mid;
    }
    return build(0.5 * (lo + hi));
}

} // namespace nlc

#endif // NLC_INITIAL_HPP
