#ifndef NLC_EXPERIMENTS_HPP
#define NLC_EXPERIMENTS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fit.hpp"
#include "initial.hpp"
#include "integrator.hpp"
#include "report.hpp"

namespace nlc {

/// An experiment refused to run because its input violates a precondition.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string describe(const ModelParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "nu=" << p.nu << ";lambda=" << p.lambda << ";gamma=" << p.gamma << ";alpha=" << p.alpha
       << ";eta=" << p.eta << ";dealias=" << p.dealias;
    return os.str();
}

inline std::string describe(const StepperConfig& c)
{
    std::ostringstream os;
    os.precision(17);
    os << "dt=" << c.dt << ";t_end=" << c.t_end << ";cfl=" << c.cfl_safety << ";sample=" << c.sample_every;
    return os.str();
}

/// Digest of the exact physical-space values of a state.
inline std::string describe(const State& s)
{
    std::string bytes;
    bytes.reserve(s.grid().size() * 4 * sizeof(double) + 16);
    auto put = [&](const ScalarField& f) {
        bytes.append(reinterpret_cast<const char*>(f.values.data()), f.values.size() * sizeof(double));
    };
    put(s.v[0]);
    put(s.v[1]);
    put(s.d[0]);
    put(s.d[1]);
    return "n=" + std::to_string(s.grid().n()) + ";state=" + digest(bytes);
}

// ---------------------------------------------------------------------------
// Perturbations and separations.
// ---------------------------------------------------------------------------

enum class PerturbTarget { velocity, director, both };

struct PerturbationSpec {
    std::uint64_t seed = 0;
    double amplitude = 1e-5;  // epsilon; 0 is accepted as the degenerate pair
    double band = 2.0;        // max |k| of perturbed modes
    PerturbTarget target = PerturbTarget::both;

    void validate(const GridSpec& g) const
    {
        if (!(amplitude >= 0.0)) throw std::invalid_argument("perturbation amplitude must be >= 0");
        if (!(band >= 0.0 && 3.0 * band <= g.n())) throw std::invalid_argument("perturbation band must lie in [0, n/3]");
        if (target == PerturbTarget::velocity && band < 1.0) {
            throw std::invalid_argument("velocity perturbation needs band >= 1");
        }
    }
};

struct Perturbation {
    VectorField2 dv;
    VectorField2 dd;
};

/** Seeded perturbation scaled so that |dv|^2 + |dd|_{H^1}^2 = amplitude^2.
 *
 * The velocity part is projected and mean-free; the director part may carry
 * a mean (band 0 perturbs the mean alone).
 */
inline Perturbation make_perturbation(const GridSpec& g, const PerturbationSpec& spec)
{
    spec.validate(g);
    std::mt19937_64 rng(spec.seed);
    Perturbation p{random_divergence_free(g, std::max(spec.band, 1.0), rng),
                   {random_band_limited(g, spec.band, true, rng), random_band_limited(g, spec.band, true, rng)}};
    if (spec.target == PerturbTarget::director) p.dv = VectorField2(g);
    if (spec.target == PerturbTarget::velocity) p.dd = VectorField2(g);
    const double norm_sq = std::pow(sobolev_norm(p.dv, 0.0), 2) + std::pow(sobolev_norm(p.dd, 1.0), 2);
    if (!(norm_sq > 0.0)) throw std::invalid_argument("perturbation shape is identically zero");
    const double scale = spec.amplitude / std::sqrt(norm_sq);
    p.dv *= scale;
    p.dd *= scale;
    return p;
}

inline State perturbed(const State& base, const Perturbation& p)
{
    State s = base;
    s.v += p.dv;
    s.d += p.dd;
    return s;
}

/// |v_a - v_b|^2_{H^sv} + |d_a - d_b|^2_{H^sd}.
inline double separation_sq(const SpectralState& a, const SpectralState& b, double sv, double sd)
{
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
        s += spectral::sobolev_norm_sq(a.v[i] - b.v[i], sv);
        s += spectral::sobolev_norm_sq(a.d[i] - b.d[i], sd);
    }
    return s;
}

namespace detail {

/// Runs a trajectory and keeps the spectral state at every sample.
inline std::vector<SpectralState> sampled_states(const State& init, const ModelParams& p, const StepperConfig& c,
                                                 Trajectory* traj = nullptr)
{
    std::vector<SpectralState> states;
    Trajectory t = simulate(init, p, c, {}, [&](long, const SpectralState& s) {
        states.push_back(s);
        return true;
    });
    if (t.blew_up) throw BlowUpError(t.blow_up_message);
    if (traj) *traj = std::move(t);
    return states;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Energy-law audit.
// ---------------------------------------------------------------------------

struct AuditStats {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    std::size_t interior_rows = 0;
    double max_increase = 0.0;  // max_m E_{m+1} - E_m
    double initial_energy = 0.0;
};

inline AuditStats audit_stats(const Trajectory& traj)
{
    if (traj.rows.size() < 3) throw std::invalid_argument("energy audit needs at least 3 trajectory rows");
    std::vector<TrajectoryRow> rows = traj.rows;
    fill_residuals(rows);
    AuditStats s;
    s.initial_energy = rows.front().energy.total;
    s.max_increase = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t m = 1; m + 1 < rows.size(); ++m) {
        s.max_residual = std::max(s.max_residual, rows[m].residual);
        sum += rows[m].residual;
        ++s.interior_rows;
    }
    for (std::size_t m = 0; m + 1 < rows.size(); ++m) {
        s.max_increase = std::max(s.max_increase, rows[m + 1].energy.total - rows[m].energy.total);
    }
    s.mean_residual = sum / static_cast<double>(s.interior_rows);
    return s;
}

/// Residuals below this are treated as exact (nothing left to reduce).
inline constexpr double residual_floor = 1e-13;
inline constexpr double monotone_tolerance = 1e-8;

/// Single-trajectory audit: residual statistics and monotone energy.
inline ExperimentReport energy_audit(const Trajectory& traj, const ModelParams& p)
{
    const AuditStats s = audit_stats(traj);
    ExperimentReport r;
    r.name = "energy_audit";
    r.inputs_digest = digest(describe(p) + ";rows=" + std::to_string(traj.rows.size()));
    r.info("max_residual", s.max_residual);
    r.info("mean_residual", s.mean_residual);
    r.add("max_energy_increase", s.max_increase, "<=", monotone_tolerance * (1.0 + std::abs(s.initial_energy)));
    return r;
}

/** Audit judged on a dt-halving pair: the coarse max residual must shrink by
 * at least `min_reduction` on the fine run. An optional anchor bounds the
 * coarse max residual itself.
 */
inline ExperimentReport energy_audit(const Trajectory& coarse, const Trajectory& fine, const ModelParams& p,
                                     double anchor = std::numeric_limits<double>::quiet_NaN(),
                                     double min_reduction = 3.0)
{
    const AuditStats a = audit_stats(coarse);
    const AuditStats b = audit_stats(fine);
    ExperimentReport r;
    r.name = "energy_audit";
    r.inputs_digest = digest(describe(p) + ";rows=" + std::to_string(coarse.rows.size()) + "/" +
                             std::to_string(fine.rows.size()));
    r.info("mean_residual", a.mean_residual);
    r.info("max_residual_fine", b.max_residual);
    if (std::isnan(anchor)) {
        r.info("max_residual", a.max_residual);
    } else {
        r.add("max_residual", a.max_residual, "<=", anchor);
    }
    double reduction = std::numeric_limits<double>::infinity();
    if (b.max_residual > residual_floor) {
        reduction = a.max_residual / b.max_residual;
    } else {
        r.notes.push_back("fine-run residual at roundoff floor; reduction not measurable");
    }
    r.add("residual_reduction", reduction, ">=", min_reduction);
    r.add("max_energy_increase", std::max(a.max_increase, b.max_increase), "<=",
          monotone_tolerance * (1.0 + std::abs(a.initial_energy)));
    return r;
}

/// Runs the coarse (config.dt) and fine (config.dt / 2) trajectories and audits them.
inline ExperimentReport run_energy_audit(const State& init, const ModelParams& p, const StepperConfig& config,
                                         double anchor = std::numeric_limits<double>::quiet_NaN(),
                                         Trajectory* coarse_out = nullptr)
{
    StepperConfig fine_cfg = config;
    fine_cfg.dt = 0.5 * config.dt;
    Trajectory coarse = simulate(init, p, config);
    Trajectory fine = simulate(init, p, fine_cfg);
    ExperimentReport r;
    if (coarse.blew_up || fine.blew_up) {
        r.name = "energy_audit";
        r.status = Status::error;
        r.notes.push_back("blow-up: " + coarse.blow_up_message + fine.blow_up_message);
    } else {
        r = energy_audit(coarse, fine, p, anchor);
    }
    r.inputs_digest = digest(describe(p) + describe(config) + describe(init));
    if (coarse_out) *coarse_out = std::move(coarse);
    return r;
}

// ---------------------------------------------------------------------------
// Dissipativity: absorbing ball for |v|^2 + |d|^2_{H^1}.
// ---------------------------------------------------------------------------

struct EnsembleConfig {
    double horizon = 20.0;
    double dt = 5e-4;
    long sample_every = 20;
    double cfl_safety = 0.5;
    double tail_fraction = 0.2;
    double spread_limit = 2.0;
    double ball_slack = 0.01;  // absorbing radius = (1 + slack) * max tail sup
};

struct EnsembleMember {
    std::vector<double> t;
    std::vector<double> q;       // |v|^2 + |d|^2_{H^1}
    std::vector<double> energy;  // E(t)
    double tail_sup = 0.0;
    double entry_time = 0.0;
    EnvelopeFit envelope;
    bool blew_up = false;
};

inline double absorbing_quantity(const SpectralState& s)
{
    double q = 0.0;
    for (int i = 0; i < 2; ++i) {
        q += spectral::sobolev_norm_sq(s.v[i], 0.0);
        q += spectral::sobolev_norm_sq(s.d[i], 1.0);
    }
    return q;
}

inline EnsembleMember run_member(const State& init, const ModelParams& p, const EnsembleConfig& cfg)
{
    EnsembleMember m;
    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = init.t + cfg.horizon;
    sc.sample_every = cfg.sample_every;
    sc.cfl_safety = cfg.cfl_safety;
    Trajectory traj = simulate(init, p, sc, {}, [&](long, const SpectralState& s) {
        m.t.push_back(s.t - init.t);
        m.q.push_back(absorbing_quantity(s));
        return true;
    });
    m.blew_up = traj.blew_up;
    for (const auto& row : traj.rows) m.energy.push_back(row.energy.total);
    return m;
}

/// Ensemble from explicit initial states; members run concurrently.
inline ExperimentReport dissipativity_ensemble(const std::vector<State>& initial, const ModelParams& p,
                                               const EnsembleConfig& cfg, std::vector<EnsembleMember>* out = nullptr)
{
    p.validate();
    if (initial.empty()) throw std::invalid_argument("dissipativity ensemble needs at least one member");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");

    std::vector<std::future<EnsembleMember>> jobs;
    for (const auto& s : initial) {
        jobs.push_back(std::async(std::launch::async, [&s, &p, &cfg] { return run_member(s, p, cfg); }));
    }
    std::vector<EnsembleMember> members;
    for (auto& j : jobs) members.push_back(j.get());

    ExperimentReport r;
    r.name = "absorb";
    std::string inputs = describe(p);
    for (const auto& s : initial) inputs += describe(s);
    r.inputs_digest = digest(inputs);

    const double tail_start = (1.0 - cfg.tail_fraction) * cfg.horizon;
    double ball = 0.0;
    for (auto& m : members) {
        if (m.blew_up) {
            r.status = Status::error;
            r.notes.push_back("member blew up");
            continue;
        }
        m.tail_sup = 0.0;
        for (std::size_t i = 0; i < m.t.size(); ++i) {
            if (m.t[i] >= tail_start) m.tail_sup = std::max(m.tail_sup, m.q[i]);
        }
        ball = std::max(ball, m.tail_sup);
        m.envelope = fit_envelope(m.t, m.energy);
    }
    const double radius = (1.0 + cfg.ball_slack) * ball;
    r.info("absorbing_radius", radius);

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, kappa_min = std::numeric_limits<double>::infinity();
    double latest_entry = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        auto& m = members[k];
        if (m.blew_up) continue;
        // entry: first sample after which the trace never leaves the ball
        m.entry_time = m.t.empty() ? 0.0 : m.t.back();
        for (std::size_t i = m.t.size(); i-- > 0;) {
            if (m.q[i] > radius) break;
            m.entry_time = m.t[i];
        }
        lo = std::min(lo, m.tail_sup);
        hi = std::max(hi, m.tail_sup);
        kappa_min = std::min(kappa_min, m.envelope.kappa);
        latest_entry = std::max(latest_entry, m.entry_time);
        const std::string tag = "member" + std::to_string(k);
        r.info(tag + "_tail_sup", m.tail_sup);
        r.info(tag + "_entry_time", m.entry_time);
        r.info(tag + "_kappa", m.envelope.kappa);
        r.info(tag + "_offset", m.envelope.offset);
        if (m.envelope.flat) r.notes.push_back(tag + ": energy trace flat, kappa not identifiable");
    }
    const double spread = hi == 0.0 ? 1.0 : hi / lo;
    r.add("tail_spread", spread, "<", cfg.spread_limit);
    r.add("kappa_min", kappa_min, ">", 0.0);
    if (latest_entry > tail_start) {
        r.notes.push_back("horizon too short: a member enters the common ball only inside the tail window");
    }
    r.add("latest_entry_time", latest_entry, "<=", tail_start);
    if (out) *out = std::move(members);
    return r;
}

/// Ensemble of seeded random states with E(0) = R for each radius R.
inline ExperimentReport dissipativity_ensemble(const std::vector<double>& radii, const ModelParams& p,
                                               const GridSpec& g, const RandomInit& base, const EnsembleConfig& cfg,
                                               std::vector<EnsembleMember>* out = nullptr)
{
    if (radii.empty()) throw std::invalid_argument("dissipativity ensemble needs at least one radius");
    std::vector<State> init;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        RandomInit ri = base;
        ri.seed = base.seed + k;
        ri.energy = radii[k];
        init.push_back(random_state(g, p, ri));
    }
    ExperimentReport r = dissipativity_ensemble(init, p, cfg, out);
    const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
    if (radii.size() < 3 || !(*lo > 0.0) || *hi < 10.0 * *lo) {
        r.notes.push_back("radii do not span a decade with >= 3 members; R-independence is weakly tested");
    }
    for (std::size_t k = 0; k < radii.size(); ++k) r.info("member" + std::to_string(k) + "_radius", radii[k]);
    return r;
}

// ---------------------------------------------------------------------------
// Continuous dependence on initial data.
// ---------------------------------------------------------------------------

struct DependenceConfig {
    double horizon = 2.0;
    double dt = 1e-4;
    long sample_every = 100;
    double cfl_safety = 0.5;
    double linear_fit_tol = 0.1;  // max residual / range of log S
    double ratio_tol = 0.1;       // S_{2 eps} / S_eps within 4 (1 +- tol)
    double slope_tol = 0.1;
};

struct SeparationTrace {
    std::vector<double> t;
    std::vector<double> s_eps;
    std::vector<double> s_2eps;
};

inline ExperimentReport continuous_dependence(const State& base, const PerturbationSpec& pert, const ModelParams& p,
                                              const DependenceConfig& cfg, SeparationTrace* out = nullptr)
{
    p.validate();
    const GridSpec& g = base.grid();
    pert.validate(g);

    ExperimentReport r;
    r.name = "perturb";
    std::ostringstream in;
    in.precision(17);
    in << describe(p) << describe(base) << ";seed=" << pert.seed << ";eps=" << pert.amplitude << ";band=" << pert.band
       << ";target=" << static_cast<int>(pert.target) << ";T=" << cfg.horizon << ";dt=" << cfg.dt;
    r.inputs_digest = digest(in.str());

    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = base.t + cfg.horizon;
    sc.sample_every = cfg.sample_every;
    sc.cfl_safety = cfg.cfl_safety;

    SeparationTrace trace;
    if (pert.amplitude == 0.0) {
        trace.t = {0.0, cfg.horizon};
        trace.s_eps = {0.0, 0.0};
        trace.s_2eps = {0.0, 0.0};
        r.add("separation_max", 0.0, "<=", 0.0);
        r.notes.push_back("epsilon = 0: perturbed and base runs coincide, S vanishes identically");
        if (out) *out = trace;
        return r;
    }

    PerturbationSpec twice = pert;
    twice.amplitude = 2.0 * pert.amplitude;
    std::vector<SpectralState> ref, one, two;
    try {
        ref = detail::sampled_states(base, p, sc);
        one = detail::sampled_states(perturbed(base, make_perturbation(g, pert)), p, sc);
        two = detail::sampled_states(perturbed(base, make_perturbation(g, twice)), p, sc);
    } catch (const BlowUpError& e) {
        r.status = Status::error;
        r.notes.push_back(std::string("blow-up: ") + e.what());
        return r;
    }
    const std::size_t count = std::min({ref.size(), one.size(), two.size()});
    std::vector<double> log_s1, log_s2;
    double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double s1 = separation_sq(one[i], ref[i], 0.0, 1.0);
        const double s2 = separation_sq(two[i], ref[i], 0.0, 1.0);
        trace.t.push_back(ref[i].t - base.t);
        trace.s_eps.push_back(s1);
        trace.s_2eps.push_back(s2);
        log_s1.push_back(std::log(s1));
        log_s2.push_back(std::log(s2));
        const double q = s2 / s1;
        ratio_lo = std::min(ratio_lo, q);
        ratio_hi = std::max(ratio_hi, q);
    }
    const LineFit f1 = fit_line(trace.t, log_s1);
    const LineFit f2 = fit_line(trace.t, log_s2);
    const double frac = f1.range > 0.0 ? f1.max_residual / f1.range : (f1.max_residual == 0.0 ? 0.0 : 1.0);
    r.info("slope", f1.slope);
    r.info("slope_2eps", f2.slope);
    r.info("log_range", f1.range);
    r.add("linear_fit_residual_fraction", frac, "<=", cfg.linear_fit_tol);
    r.add("ratio_min", ratio_lo, ">=", 4.0 * (1.0 - cfg.ratio_tol));
    r.add("ratio_max", ratio_hi, "<=", 4.0 * (1.0 + cfg.ratio_tol));
    r.add("slope_difference", std::abs(f2.slope - f1.slope), "<=", cfg.slope_tol * std::abs(f1.slope) + 1e-6);
    if (out) *out = std::move(trace);
    return r;
}

// ---------------------------------------------------------------------------
// Smoothing: H^1 x H^2 separations mapped into H^2 x H^3 over unit time.
// ---------------------------------------------------------------------------

struct SmoothingConfig {
    double pre_time = 10.0;
    double interval = 1.0;
    double dt = 5e-4;
    long sample_every = 100;
    double cfl_safety = 0.5;
    double grad_v_threshold = 1e-3;
    double spread_limit = 2.0;
};

inline double grad_norm(const VectorField2& v)
{
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
        const Spectrum f = forward(v[i]);
        s += spectral::sobolev_norm_sq(f, 1.0) - spectral::sobolev_norm_sq(f, 0.0);
    }
    return std::sqrt(std::max(s, 0.0));
}

/// Runs the base to pre_time and checks it is quiescent.
inline State pre_equilibrate(const State& base, const ModelParams& p, const SmoothingConfig& cfg)
{
    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = base.t + cfg.pre_time;
    sc.sample_every = cfg.sample_every;
    sc.cfl_safety = cfg.cfl_safety;
    Trajectory t = simulate(base, p, sc);
    if (t.blew_up) throw BlowUpError("pre-equilibration blew up: " + t.blow_up_message);
    return t.final_state;
}

inline ExperimentReport smoothing_ratio(const State& base, const std::vector<PerturbationSpec>& perts,
                                        const ModelParams& p, const SmoothingConfig& cfg,
                                        std::vector<double>* rho_out = nullptr)
{
    p.validate();
    const GridSpec& g = base.grid();
    if (perts.empty()) throw std::invalid_argument("smoothing ratio needs at least one perturbation");
    for (const auto& q : perts) {
        q.validate(g);
        if (q.amplitude == 0.0) throw std::invalid_argument("smoothing ratio undefined for a zero perturbation");
    }

    const State start = cfg.pre_time > 0.0 ? pre_equilibrate(base, p, cfg) : base;
    const double gv = grad_norm(start.v);
    if (!(gv < cfg.grad_v_threshold)) {
        throw PreconditionError("base state not equilibrated: |grad v| = " + std::to_string(gv));
    }

    ExperimentReport r;
    r.name = "smooth";
    std::ostringstream in;
    in.precision(17);
    in << describe(p) << describe(base) << ";pre=" << cfg.pre_time << ";dt=" << cfg.dt;
    for (const auto& q : perts) in << ";" << q.seed << "/" << q.amplitude << "/" << q.band << "/" << static_cast<int>(q.target);
    r.inputs_digest = digest(in.str());
    r.info("base_grad_v", gv);

    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = start.t + cfg.interval;
    sc.sample_every = std::numeric_limits<long>::max();
    sc.cfl_safety = cfg.cfl_safety;

    const Trajectory ref = simulate(start, p, sc);
    const SpectralState ref_end = to_spectral(ref.final_state);
    const SpectralState ref_start = to_spectral(start);

    std::vector<double> rho;
    for (std::size_t k = 0; k < perts.size(); ++k) {
        const State s0 = perturbed(start, make_perturbation(g, perts[k]));
        const Trajectory t = simulate(s0, p, sc);
        if (t.blew_up) {
            r.status = Status::error;
            r.notes.push_back("perturbed run blew up");
            return r;
        }
        const double before = separation_sq(to_spectral(s0), ref_start, 1.0, 2.0);
        const double after = separation_sq(to_spectral(t.final_state), ref_end, 2.0, 3.0);
        rho.push_back(after / before);
        std::ostringstream tag;
        tag.precision(3);
        tag << "rho_eps_" << perts[k].amplitude;
        r.info(tag.str(), rho.back());
    }
    const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
    r.add("rho_finite", std::isfinite(*hi) && *lo > 0.0 ? 1.0 : 0.0, ">=", 1.0);
    r.add("rho_spread", *hi / *lo, "<", cfg.spread_limit);
    if (rho_out) *rho_out = rho;
    return r;
}

// ---------------------------------------------------------------------------
// Long-time relaxation to a steady state.
// ---------------------------------------------------------------------------

struct EquilibrateConfig {
    double dt = 1e-3;
    long sample_every = 10;
    double cfl_safety = 0.5;
};

/// |grad v| + |lap d - f(d)| in L^2.
inline double grad_v_norm(const EnergyBreakdown& e, const ModelParams& p) { return std::sqrt(e.visc_dissipation / p.nu); }

inline double molecular_field_norm(const EnergyBreakdown& e, const ModelParams& p)
{
    return std::sqrt(std::max(e.quantity_a - e.visc_dissipation / p.nu, 0.0));
}

inline double stationarity_defect(const EnergyBreakdown& e, const ModelParams& p)
{
    return grad_v_norm(e, p) + molecular_field_norm(e, p);
}

inline ExperimentReport equilibrate(const State& init, const ModelParams& p, double tol, double t_max,
                                    const EquilibrateConfig& cfg, Trajectory* out = nullptr)
{
    p.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("equilibrate: tol must be > 0");
    ExperimentReport r;
    r.name = "equilibrate";
    std::ostringstream in;
    in.precision(17);
    in << describe(p) << describe(init) << ";tol=" << tol << ";tmax=" << t_max << ";dt=" << cfg.dt;
    r.inputs_digest = digest(in.str());

    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = init.t + t_max;
    sc.sample_every = cfg.sample_every;
    sc.cfl_safety = cfg.cfl_safety;

    bool converged = false;
    double hit = std::numeric_limits<double>::quiet_NaN();
    SpectralState last;
    Trajectory traj = simulate(init, p, sc, {}, [&](long, const SpectralState& s) {
        last = s;
        if (stationarity_defect(energy(s, p), p) < tol) {
            converged = true;
            hit = s.t - init.t;
            return false;
        }
        return true;
    });
    if (traj.blew_up) {
        r.status = Status::error;
        r.notes.push_back("blow-up: " + traj.blow_up_message);
        return r;
    }
    const EnergyBreakdown e = energy(last, p);
    const double v_norm = std::sqrt(spectral::sobolev_norm_sq(last.v[0], 0.0) + spectral::sobolev_norm_sq(last.v[1], 0.0));
    r.info("t_final", last.t - init.t);
    r.info("t_converged", hit);
    r.info("quantity_a", e.quantity_a);
    r.info("grad_v", grad_v_norm(e, p));
    r.info("molecular_field", molecular_field_norm(e, p));
    r.add("stationarity_defect", stationarity_defect(e, p), "<", tol);
    r.add("velocity_norm", v_norm, "<", tol);
    if (!converged) {
        r.status = Status::inconclusive;
        r.notes.push_back("t_max reached before the stationarity defect fell below tol");
    }
    if (out) *out = std::move(traj);
    return r;
}

// ---------------------------------------------------------------------------
// Manufactured solutions.
// ---------------------------------------------------------------------------

/** v_m = a_v cos(t) TG(x, y), d_m = (1 + a_d cos(2 pi x) cos t, a_d sin(2 pi y) sin t). */
struct ManufacturedSolution {
    double velocity_amplitude = 1.0;
    double director_amplitude = 0.1;

    State at(const GridSpec& g, double t) const
    {
        const double ad = director_amplitude;
        State s;
        s.v = taylor_green_velocity(g, velocity_amplitude * std::cos(t));
        s.d = VectorField2::sample(
            g, [&](double x, double) { return 1.0 + ad * std::cos(two_pi * x) * std::cos(t); },
            [&](double, double y) { return ad * std::sin(two_pi * y) * std::sin(t); });
        s.t = t;
        return s;
    }

    std::pair<VectorField2, VectorField2> time_derivative(const GridSpec& g, double t) const
    {
        const double ad = director_amplitude;
        VectorField2 dv = taylor_green_velocity(g, -velocity_amplitude * std::sin(t));
        VectorField2 dd = VectorField2::sample(
            g, [&](double x, double) { return -ad * std::cos(two_pi * x) * std::sin(t); },
            [&](double, double y) { return ad * std::sin(two_pi * y) * std::cos(t); });
        return {std::move(dv), std::move(dd)};
    }

    /// Forcing that makes the manufactured pair an exact solution of the
    /// forced semi-discrete system: F = du_m/dt - L u_m - N(u_m).
    std::pair<VectorField2, VectorField2> forcing_at(const GridSpec& g, const ModelParams& p, double t) const
    {
        const State s = at(g, t);
        auto [fv, fd] = time_derivative(g, t);
        const ExplicitRhs n = explicit_rhs(to_spectral(s), p);
        for (int i = 0; i < 2; ++i) {
            fv[i] -= inverse(n.v[i]) + p.nu * laplacian(s.v[i]);
            fd[i] -= inverse(n.d[i]) + p.gamma * laplacian(s.d[i]);
        }
        return {std::move(fv), std::move(fd)};
    }

    Forcing forcing(const GridSpec& g, const ModelParams& p) const
    {
        return [*this, g, p](double t) { return forcing_at(g, p, t); };
    }
};

struct MmsConfig {
    double t_final = 0.5;
    double min_ratio = 3.5;
    double spatial_tol = 1e-10;
};

inline double max_error(const State& a, const State& b)
{
    return std::max(max_abs_diff(a.v, b.v), max_abs_diff(a.d, b.d));
}

inline double mms_error(const ManufacturedSolution& ms, const ModelParams& p, int n, double dt, double t_final)
{
    const GridSpec g(n);
    StepperConfig sc;
    sc.dt = dt;
    sc.t_end = t_final;
    sc.sample_every = std::numeric_limits<long>::max();
    sc.cfl_safety = 1.0;
    const Trajectory t = simulate(ms.at(g, 0.0), p, sc, ms.forcing(g, p));
    if (t.blew_up) throw BlowUpError("mms run blew up: " + t.blow_up_message);
    return max_error(t.final_state, ms.at(g, t_final));
}

inline ExperimentReport mms_convergence(const ModelParams& p, const std::vector<double>& dt_list,
                                        const std::vector<int>& n_list, const MmsConfig& cfg = {},
                                        const ManufacturedSolution& ms = {})
{
    p.validate();
    if (dt_list.size() < 2 || n_list.empty()) throw std::invalid_argument("mms: need >= 2 time steps and >= 1 grid");
    ExperimentReport r;
    r.name = "mms";
    std::ostringstream in;
    in.precision(17);
    in << describe(p) << ";T=" << cfg.t_final << ";av=" << ms.velocity_amplitude << ";ad=" << ms.director_amplitude;
    for (double dt : dt_list) in << ";dt=" << dt;
    for (int n : n_list) in << ";n=" << n;
    r.inputs_digest = digest(in.str());

    std::vector<double> errs;
    for (double dt : dt_list) {
        errs.push_back(mms_error(ms, p, n_list.front(), dt, cfg.t_final));
        std::ostringstream tag;
        tag << "error_n" << n_list.front() << "_dt" << dt;
        r.info(tag.str(), errs.back());
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
        // normalized to a halving of dt
        const double ratio = errs[k] / errs[k + 1] / std::pow(0.5 * dt_list[k] / dt_list[k + 1], 2);
        r.add("ratio_" + std::to_string(k), ratio, ">=", cfg.min_ratio);
        r.info("order_" + std::to_string(k), std::log(errs[k] / errs[k + 1]) / std::log(dt_list[k] / dt_list[k + 1]));
    }
    for (std::size_t j = 1; j < n_list.size(); ++j) {
        const double e = mms_error(ms, p, n_list[j], dt_list.front(), cfg.t_final);
        r.info("error_n" + std::to_string(n_list[j]), e);
        r.add("spatial_difference_n" + std::to_string(n_list[j]), std::abs(e - errs.front()), "<=", cfg.spatial_tol);
    }
    return r;
}

} // namespace nlc

#endif // NLC_EXPERIMENTS_HPP
