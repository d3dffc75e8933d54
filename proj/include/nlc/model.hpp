#ifndef NLC_MODEL_HPP
#define NLC_MODEL_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spectral.hpp"

namespace nlc {

/** Material parameters of the penalized nematic flow.
 *
 * nu, lambda and gamma default to the normalized values 1; alpha and eta have
 * no meaningful default and must be set by the caller.
 */
struct ModelParams {
    double nu = 1.0;
    double lambda = 1.0;
    double gamma = 1.0;
    double alpha = std::nan("");
    double eta = std::nan("");
    bool dealias = true;

    void validate() const
    {
        if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
        if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
        if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0,1]");
    }
};

/// Velocity v (divergence-free, zero mean), director d, time t.
struct State {
    VectorField2 v;
    VectorField2 d;
    double t = 0.0;

    const GridSpec& grid() const { return v.grid(); }
};

inline State zero_state(const GridSpec& g)
{
    return {VectorField2(g), VectorField2(g), 0.0};
}

struct EnergyBreakdown {
    double kinetic = 0.0;           // 1/2 |v|^2
    double elastic = 0.0;           // lambda/2 |grad d|^2
    double penalty = 0.0;           // lambda int F(d)
    double total = 0.0;
    double visc_dissipation = 0.0;  // nu |grad v|^2
    double rot_dissipation = 0.0;   // lambda gamma |lap d - f(d)|^2
    double quantity_a = 0.0;        // |grad v|^2 + |lap d - f(d)|^2
};

/** State in Fourier space; the integrator evolves this form. */
struct SpectralState {
    std::array<Spectrum, 2> v;
    std::array<Spectrum, 2> d;
    double t = 0.0;

    const GridSpec& grid() const { return v[0].grid; }
};

inline SpectralState to_spectral(const State& s)
{
    return {{forward(s.v[0]), forward(s.v[1])}, {forward(s.d[0]), forward(s.d[1])}, s.t};
}

inline State to_physical(const SpectralState& s)
{
    return {{inverse(s.v[0]), inverse(s.v[1])}, {inverse(s.d[0]), inverse(s.d[1])}, s.t};
}

// ---------------------------------------------------------------------------
// Pointwise pieces.
// ---------------------------------------------------------------------------

/// f(d) = eta^-2 (|d|^2 - 1) d, optionally dealiased.
inline VectorField2 penalty_f(const VectorField2& d, double eta, bool dealias_product = false)
{
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("penalty_f: eta must lie in (0,1]");
    const double inv = 1.0 / (eta * eta);
    VectorField2 out(d.grid());
    for (std::size_t k = 0; k < d[0].size(); ++k) {
        const double dx = d[0].values[k], dy = d[1].values[k];
        const double w = inv * (dx * dx + dy * dy - 1.0);
        out[0].values[k] = w * dx;
        out[1].values[k] = w * dy;
    }
    return dealias_product ? dealias(out) : out;
}

/// F(d) = (|d|^2 - 1)^2 / (4 eta^2).
inline ScalarField potential_F(const VectorField2& d, double eta)
{
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("potential_F: eta must lie in (0,1]");
    const double inv = 1.0 / (4.0 * eta * eta);
    ScalarField out(d.grid());
    for (std::size_t k = 0; k < d[0].size(); ++k) {
        const double q = d[0].values[k] * d[0].values[k] + d[1].values[k] * d[1].values[k] - 1.0;
        out.values[k] = inv * q * q;
    }
    return out;
}

/// G = lap d - f(d), equal to -(1/lambda) times the variational derivative of E in d.
inline VectorField2 molecular_field(const VectorField2& d, double eta, bool dealias_product = false)
{
    return laplacian(d) - penalty_f(d, eta, dealias_product);
}

inline VectorField2 molecular_field(const VectorField2& d, const ModelParams& p)
{
    return molecular_field(d, p.eta, p.dealias);
}

/// T_ij = sum_m d_i d_m d_j d_m.
inline TensorField2 ericksen_stress(const VectorField2& d, bool dealias_product = false)
{
    const GridSpec& g = d.grid();
    std::array<std::array<ScalarField, 2>, 2> grad;  // grad[m][j] = d_j d_m
    for (int m = 0; m < 2; ++m) {
        const Spectrum s = forward(d[m]);
        grad[m][0] = inverse(spectral::derivative(s, Axis::x, 1));
        grad[m][1] = inverse(spectral::derivative(s, Axis::y, 1));
    }
    TensorField2 t(g);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            auto& out = t(i, j).values;
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] = grad[0][i].values[k] * grad[0][j].values[k] + grad[1][i].values[k] * grad[1][j].values[k];
            }
            if (dealias_product) t(i, j) = dealias(t(i, j));
        }
    }
    return t;
}

/// T_ij = alpha g_i d_j - (1 - alpha) d_i g_j.
inline TensorField2 kinematic_stress(const VectorField2& d, const VectorField2& g, double alpha,
                                     bool dealias_product = false)
{
    TensorField2 t(d.grid());
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            auto& out = t(i, j).values;
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] = alpha * g[i].values[k] * d[j].values[k] - (1.0 - alpha) * d[i].values[k] * g[j].values[k];
            }
            if (dealias_product) t(i, j) = dealias(t(i, j));
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Explicit right-hand sides, evaluated in one pass over the spectral state.
// ---------------------------------------------------------------------------

struct ExplicitRhs {
    std::array<Spectrum, 2> v;  // Leray-projected
    std::array<Spectrum, 2> d;
};

namespace detail {

inline void finish_product(Spectrum& s, bool dealias_on)
{
    if (dealias_on) spectral::dealias_in_place(s);
}

/// Molecular field G = lap d - f(d) in Fourier space, plus the (possibly
/// dealiased) penalty spectrum used to build it.
struct MolecularSpectra {
    std::array<Spectrum, 2> g;
    std::array<Spectrum, 2> f;
};

inline MolecularSpectra molecular_spectra(const std::array<Spectrum, 2>& dhat,
                                          const std::array<ScalarField, 2>& d, const ModelParams& p)
{
    const GridSpec& grid = dhat[0].grid;
    const double inv = 1.0 / (p.eta * p.eta);
    std::array<ScalarField, 2> fd{ScalarField(grid), ScalarField(grid)};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double dx = d[0].values[k], dy = d[1].values[k];
        const double w = inv * (dx * dx + dy * dy - 1.0);
        fd[0].values[k] = w * dx;
        fd[1].values[k] = w * dy;
    }
    MolecularSpectra out;
    for (int m = 0; m < 2; ++m) {
        out.f[m] = forward(fd[m]);
        finish_product(out.f[m], p.dealias);
        out.g[m] = spectral::laplacian(dhat[m]) - out.f[m];
    }
    return out;
}

} // namespace detail

/** Explicit parts of both equations.
 *
 * Momentum: -(v.grad)v - lambda div[grad d (.) grad d + alpha G (x) d - (1-alpha) d (x) G],
 * then Leray-projected. Director: -(v.grad)d + alpha (grad v) d - (1-alpha)(grad v)^T d
 * - gamma f(d), with (grad v)_ij = d_j v_i. The diffusion terms nu lap v and
 * gamma lap d are left to the caller.
 */
inline ExplicitRhs explicit_rhs(const SpectralState& s, const ModelParams& p)
{
    const GridSpec& g = s.grid();
    const std::size_t size = g.size();

    std::array<ScalarField, 2> v, d, gm;
    std::array<std::array<ScalarField, 2>, 2> dv, dd;  // dv[i][j] = d_j v_i
    for (int i = 0; i < 2; ++i) {
        v[i] = inverse(s.v[i]);
        d[i] = inverse(s.d[i]);
        dv[i][0] = inverse(spectral::derivative(s.v[i], Axis::x, 1));
        dv[i][1] = inverse(spectral::derivative(s.v[i], Axis::y, 1));
        dd[i][0] = inverse(spectral::derivative(s.d[i], Axis::x, 1));
        dd[i][1] = inverse(spectral::derivative(s.d[i], Axis::y, 1));
    }

    const auto mol = detail::molecular_spectra(s.d, d, p);
    for (int i = 0; i < 2; ++i) gm[i] = inverse(mol.g[i]);

    ExplicitRhs out;

    // Momentum: total stress tensor, then its divergence.
    const double a = p.alpha;
    std::array<Spectrum, 4> stress;
    ScalarField work(g);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < size; ++k) {
                const double ericksen = dd[0][i].values[k] * dd[0][j].values[k] + dd[1][i].values[k] * dd[1][j].values[k];
                const double kinematic = a * gm[i].values[k] * d[j].values[k] - (1.0 - a) * d[i].values[k] * gm[j].values[k];
                work.values[k] = ericksen + kinematic;
            }
            stress[static_cast<std::size_t>(2 * i + j)] = forward(work);
            detail::finish_product(stress[static_cast<std::size_t>(2 * i + j)], p.dealias);
        }
    }
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < size; ++k) {
            work.values[k] = v[0].values[k] * dv[i][0].values[k] + v[1].values[k] * dv[i][1].values[k];
        }
        Spectrum adv = forward(work);
        detail::finish_product(adv, p.dealias);
        Spectrum div = spectral::derivative(stress[static_cast<std::size_t>(2 * i)], Axis::x, 1) +
                       spectral::derivative(stress[static_cast<std::size_t>(2 * i + 1)], Axis::y, 1);
        out.v[i] = -1.0 * adv - p.lambda * div;
    }
    spectral::leray_in_place(out.v[0], out.v[1]);

    // Director: transport and kinematic rotation/stretching.
    for (int m = 0; m < 2; ++m) {
        for (std::size_t k = 0; k < size; ++k) {
            const double transport = v[0].values[k] * dd[m][0].values[k] + v[1].values[k] * dd[m][1].values[k];
            const double grad_v_d = dv[m][0].values[k] * d[0].values[k] + dv[m][1].values[k] * d[1].values[k];
            const double grad_vt_d = dv[0][m].values[k] * d[0].values[k] + dv[1][m].values[k] * d[1].values[k];
            work.values[k] = -transport + a * grad_v_d - (1.0 - a) * grad_vt_d;
        }
        Spectrum kin = forward(work);
        detail::finish_product(kin, p.dealias);
        out.d[m] = kin - p.gamma * mol.f[m];
    }
    return out;
}

inline VectorField2 momentum_explicit_rhs(const State& state, const ModelParams& p)
{
    const auto r = explicit_rhs(to_spectral(state), p);
    return {inverse(r.v[0]), inverse(r.v[1])};
}

inline VectorField2 director_explicit_rhs(const State& state, const ModelParams& p)
{
    const auto r = explicit_rhs(to_spectral(state), p);
    return {inverse(r.d[0]), inverse(r.d[1])};
}

// ---------------------------------------------------------------------------
// Energy functional and dissipation.
// ---------------------------------------------------------------------------

inline EnergyBreakdown energy(const SpectralState& s, const ModelParams& p)
{
    const GridSpec& g = s.grid();
    EnergyBreakdown e;
    double v_l2 = 0.0, grad_v = 0.0, grad_d = 0.0;
    for (int i = 0; i < 2; ++i) {
        v_l2 += spectral::sobolev_norm_sq(s.v[i], 0.0);
        for (int r = 0; r < g.spectral_rows(); ++r) {
            for (int c = 0; c < g.spectral_cols(); ++c) {
                const double w = column_weight(g, c) * spectral::wavenumber_sq(g, r, c);
                grad_v += w * std::norm(s.v[i](r, c));
                grad_d += w * std::norm(s.d[i](r, c));
            }
        }
    }
    const std::array<ScalarField, 2> d{inverse(s.d[0]), inverse(s.d[1])};
    const auto mol = detail::molecular_spectra(s.d, d, p);
    const double g_l2 = spectral::sobolev_norm_sq(mol.g[0], 0.0) + spectral::sobolev_norm_sq(mol.g[1], 0.0);

    double pot = 0.0;
    const double inv = 1.0 / (4.0 * p.eta * p.eta);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double q = d[0].values[k] * d[0].values[k] + d[1].values[k] * d[1].values[k] - 1.0;
        pot += inv * q * q;
    }
    pot /= static_cast<double>(g.size());

    e.kinetic = 0.5 * v_l2;
    e.elastic = 0.5 * p.lambda * grad_d;
    e.penalty = p.lambda * pot;
    e.total = e.kinetic + e.elastic + e.penalty;
    e.visc_dissipation = p.nu * grad_v;
    e.rot_dissipation = p.lambda * p.gamma * g_l2;
    e.quantity_a = grad_v + g_l2;
    return e;
}

inline EnergyBreakdown energy(const State& s, const ModelParams& p)
{
    return energy(to_spectral(s), p);
}

} // namespace nlc

#endif // NLC_MODEL_HPP
