#ifndef NLC_INTEGRATOR_HPP
#define NLC_INTEGRATOR_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include "model.hpp"

namespace nlc {

/// Raised when a step produces non-finite values.
struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when dt exceeds the advective bound by more than a factor 10.
struct CflViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StepperConfig {
    double dt = 1e-4;
    double t_end = 0.0;
    double cfl_safety = 0.5;
    long sample_every = 1;
    long snapshot_every = 0;  // 0 = never

    void validate() const
    {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
        if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0,1]");
        if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
        if (snapshot_every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
    }
};

struct TrajectoryRow {
    double t = 0.0;
    EnergyBreakdown energy;
    double norm_v_h1 = 0.0;
    double norm_d_h2 = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();  // undefined at the end rows
};

struct Snapshot {
    long step = 0;
    State state;
};

struct DtChange {
    double t = 0.0;
    double dt = 0.0;
    std::string reason;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::vector<Snapshot> snapshots;
    std::vector<DtChange> dt_changes;
    bool blew_up = false;
    std::string blow_up_message;
    State final_state;
    long steps = 0;
};

/// Body forcing (momentum, director) evaluated at a given time.
using Forcing = std::function<std::pair<VectorField2, VectorField2>(double)>;

/// Called at every sampled step; returning false ends the run early.
using Observer = std::function<bool(long step, const SpectralState&)>;

inline constexpr double quiescent_speed = 1e-8;

inline double cfl_dt(const VectorField2& v, double cfl_safety)
{
    return cfl_safety * v.grid().spacing() / std::max(v.max_norm(), quiescent_speed);
}

inline double cfl_dt(const State& state, const ModelParams&, double cfl_safety)
{
    return cfl_dt(state.v, cfl_safety);
}

namespace detail {

/// exp(-coef |2 pi k|^2 tau) per stored mode.
inline std::vector<double> diffusion_factors(const GridSpec& g, double coef, double tau)
{
    std::vector<double> f(g.spectral_size());
    for (int r = 0; r < g.spectral_rows(); ++r) {
        for (int c = 0; c < g.spectral_cols(); ++c) {
            f[static_cast<std::size_t>(r) * g.spectral_cols() + c] = std::exp(-coef * spectral::wavenumber_sq(g, r, c) * tau);
        }
    }
    return f;
}

struct Factors {
    double dt = -1.0;
    std::vector<double> v, d;

    void ensure(const GridSpec& g, const ModelParams& p, double step)
    {
        if (step == dt && !v.empty()) return;
        dt = step;
        v = diffusion_factors(g, p.nu, step);
        d = diffusion_factors(g, p.gamma, step);
    }
};

inline ExplicitRhs rhs_with_forcing(const SpectralState& s, const ModelParams& p, const Forcing& forcing)
{
    ExplicitRhs r = explicit_rhs(s, p);
    if (forcing) {
        auto [fv, fd] = forcing(s.t);
        Spectrum fx = forward(fv[0]);
        Spectrum fy = forward(fv[1]);
        spectral::leray_in_place(fx, fy);
        r.v[0] += fx;
        r.v[1] += fy;
        r.d[0] += forward(fd[0]);
        r.d[1] += forward(fd[1]);
    }
    return r;
}

inline bool finite(const Spectrum& s)
{
    for (const auto& z : s.c) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

inline bool finite(const SpectralState& s)
{
    return finite(s.v[0]) && finite(s.v[1]) && finite(s.d[0]) && finite(s.d[1]);
}

/// Flushes subnormal inputs and results to zero on the calling thread while
/// alive, restoring the previous mode on exit.
class FlushSubnormals {
public:
#if defined(__SSE2__)
    FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | ftz_daz); }
    ~FlushSubnormals() { _mm_setcsr(saved_); }

private:
    static constexpr unsigned ftz_daz = 0x8040;
    unsigned saved_;
#else
    FlushSubnormals() = default;
#endif
    FlushSubnormals(const FlushSubnormals&) = delete;
    FlushSubnormals& operator=(const FlushSubnormals&) = delete;
};

/** One integrating-factor Heun step.
 *
 *   u*      = E (u_n + dt N(u_n, t_n))
 *   u_{n+1} = E u_n + dt/2 (E N(u_n, t_n) + N(u*, t_n + dt))
 *
 * with E the exact diffusion propagator over dt. Velocity is projected after
 * each stage.
 */
inline SpectralState heun_step(const SpectralState& u, const ModelParams& p, double dt, Factors& factors,
                               const Forcing& forcing)
{
    const GridSpec& g = u.grid();
    factors.ensure(g, p, dt);
    const std::size_t size = g.spectral_size();

    const ExplicitRhs n0 = rhs_with_forcing(u, p, forcing);

    SpectralState pred = u;
    pred.t = u.t + dt;
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < size; ++k) {
            pred.v[i].c[k] = factors.v[k] * (u.v[i].c[k] + dt * n0.v[i].c[k]);
            pred.d[i].c[k] = factors.d[k] * (u.d[i].c[k] + dt * n0.d[i].c[k]);
        }
    }
    spectral::leray_in_place(pred.v[0], pred.v[1]);

    const ExplicitRhs n1 = rhs_with_forcing(pred, p, forcing);

    SpectralState next = u;
    next.t = u.t + dt;
    const double half = 0.5 * dt;
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < size; ++k) {
            next.v[i].c[k] = factors.v[k] * (u.v[i].c[k] + half * n0.v[i].c[k]) + half * n1.v[i].c[k];
            next.d[i].c[k] = factors.d[k] * (u.d[i].c[k] + half * n0.d[i].c[k]) + half * n1.d[i].c[k];
        }
    }
    // projection also zeroes the mean mode
    spectral::leray_in_place(next.v[0], next.v[1]);

    if (!finite(next)) {
        throw BlowUpError("non-finite field at t = " + std::to_string(next.t));
    }
    return next;
}

inline TrajectoryRow make_row(const SpectralState& s, const ModelParams& p)
{
    TrajectoryRow row;
    row.t = s.t;
    row.energy = energy(s, p);
    row.norm_v_h1 = std::sqrt(spectral::sobolev_norm_sq(s.v[0], 1.0) + spectral::sobolev_norm_sq(s.v[1], 1.0));
    row.norm_d_h2 = std::sqrt(spectral::sobolev_norm_sq(s.d[0], 2.0) + spectral::sobolev_norm_sq(s.d[1], 2.0));
    return row;
}

} // namespace detail

/// Centered energy-law defect |dE/dt + D_visc + D_rot| / (1 + |E|) at interior rows.
inline void fill_residuals(std::vector<TrajectoryRow>& rows)
{
    for (auto& r : rows) r.residual = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t m = 1; m + 1 < rows.size(); ++m) {
        const double dedt = (rows[m + 1].energy.total - rows[m - 1].energy.total) / (rows[m + 1].t - rows[m - 1].t);
        const auto& e = rows[m].energy;
        rows[m].residual = std::abs(dedt + e.visc_dissipation + e.rot_dissipation) / (1.0 + std::abs(e.total));
    }
}

/// Single step on a physical-space state.
inline State step(const State& state, const ModelParams& p, double dt, double cfl_safety = 1.0)
{
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    if (!state.v.all_finite() || !state.d.all_finite()) throw BlowUpError("step: non-finite input state");
    const double bound = cfl_dt(state, p, cfl_safety);
    if (dt > 10.0 * bound) {
        throw CflViolation("step: dt = " + std::to_string(dt) + " exceeds 10x the CFL bound " + std::to_string(bound));
    }
    const detail::FlushSubnormals flush;
    detail::Factors factors;
    return to_physical(detail::heun_step(to_spectral(state), p, dt, factors, {}));
}

inline constexpr int max_dt_halvings = 8;

/** Integrates from state.t to config.t_end.
 *
 * Rows are taken every sample_every steps and at the final time. The step is
 * re-checked against the advective bound at every sample. A step that
 * produces non-finite values is retried with half the step, at most
 * max_dt_halvings times over the run; after that the trajectory is returned
 * with blew_up set.
 */
inline Trajectory simulate(const State& initial, const ModelParams& p, const StepperConfig& config,
                           const Forcing& forcing = {}, const Observer& observer = {})
{
    p.validate();
    config.validate();
    if (!initial.v.all_finite() || !initial.d.all_finite()) throw BlowUpError("simulate: non-finite initial state");

    const detail::FlushSubnormals flush;
    Trajectory traj;
    SpectralState u = to_spectral(initial);
    const double t_end = std::max(config.t_end, initial.t);
    double dt = config.dt;
    int halvings = 0;
    long step_count = 0;
    detail::Factors factors;

    auto sample = [&](bool force) -> bool {
        const bool on_cadence = step_count % config.sample_every == 0;
        if (!on_cadence && !force) return true;
        if (!traj.rows.empty() && traj.rows.back().t == u.t) return true;
        traj.rows.push_back(detail::make_row(u, p));
        return observer ? observer(step_count, u) : true;
    };
    auto snapshot = [&] {
        if (config.snapshot_every > 0 && step_count % config.snapshot_every == 0) {
            traj.snapshots.push_back({step_count, to_physical(u)});
        }
    };
    // dt is dt_cap / 2^j with the smallest j that respects the advective
    // bound; dt_cap itself only shrinks on non-finite steps.
    double dt_cap = dt;
    auto check_cfl = [&] {
        const double bound = cfl_dt(VectorField2(inverse(u.v[0]), inverse(u.v[1])), config.cfl_safety);
        double next = dt_cap;
        while (next > bound) next *= 0.5;
        if (next != dt) {
            dt = next;
            traj.dt_changes.push_back({u.t, dt, "cfl"});
        }
    };

    bool keep_going = sample(true);
    snapshot();
    const double t_tol = 1e-12 * std::max(1.0, t_end);
    while (keep_going && u.t < t_end - t_tol) {
        if (step_count % config.sample_every == 0) check_cfl();
        const double h = std::min(dt, t_end - u.t);
        try {
            SpectralState next = detail::heun_step(u, p, h, factors, forcing);
            if (t_end - next.t <= t_tol) next.t = t_end;
            u = std::move(next);
        } catch (const BlowUpError& e) {
            if (halvings >= max_dt_halvings) {
                traj.blew_up = true;
                traj.blow_up_message = e.what();
                break;
            }
            ++halvings;
            dt *= 0.5;
            dt_cap = std::min(dt_cap, dt);
            traj.dt_changes.push_back({u.t, dt, "non-finite"});
            continue;
        }
        ++step_count;
        snapshot();
        keep_going = sample(u.t >= t_end);
    }
    if (!traj.blew_up && keep_going) sample(true);

    fill_residuals(traj.rows);
    traj.final_state = to_physical(u);
    traj.steps = step_count;
    return traj;
}

} // namespace nlc

#endif // NLC_INTEGRATOR_HPP
