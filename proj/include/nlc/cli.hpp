#ifndef NLC_CLI_HPP
#define NLC_CLI_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "experiments.hpp"
#include "io.hpp"

namespace nlc {

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_inconclusive = 2, exit_blow_up = 3 };

struct CliOptions {
    std::filesystem::path out_dir = ".";
    bool quiet = false;
};

/// Resolves a config path against the output directory unless it is absolute.
inline std::filesystem::path output_path(const CliOptions& opt, const std::string& rel)
{
    const std::filesystem::path p(rel);
    return p.is_absolute() ? p : opt.out_dir / p;
}

inline int exit_code(const ExperimentReport& r)
{
    switch (r.status) {
    case Status::pass: return exit_ok;
    case Status::inconclusive: return exit_inconclusive;
    case Status::error: return exit_blow_up;
    case Status::fail: return exit_error;
    }
    return exit_error;
}

/// Writes the report CSV, prints the summary line and maps status to an exit code.
inline int finish_report(ExperimentReport& r, const CliOptions& opt, std::ostream& out)
{
    const auto path = output_path(opt, "report_" + r.name + ".csv");
    r.artifacts.insert(r.artifacts.begin(), path.string());
    write_report(path, r);
    out << r.summary() << '\n';
    if (!opt.quiet) {
        for (const auto& n : r.notes) out << "  note: " << n << '\n';
        for (const auto& a : r.artifacts) out << "  wrote " << a << '\n';
    }
    return exit_code(r);
}

inline int cmd_run(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    const Trajectory t = simulate(initial_state(c), c.params, c.stepper());
    const auto csv = output_path(opt, c.output.csv_path);
    write_trajectory_csv(csv, t.rows);
    std::vector<std::filesystem::path> snaps;
    if (c.output.snapshot_every > 0) snaps = write_snapshots(output_path(opt, c.output.snapshot_dir), t.snapshots);
    if (t.blew_up) {
        out << "BLOWUP run " << t.blow_up_message << '\n';
        return exit_blow_up;
    }
    out << "OK run steps=" << t.steps << " t=" << format_double(t.final_state.t)
        << " E=" << format_double(t.rows.back().energy.total) << '\n';
    if (!opt.quiet) {
        out << "  wrote " << csv.string() << '\n';
        if (!snaps.empty()) out << "  wrote " << snaps.size() << " snapshots\n";
        for (const auto& d : t.dt_changes) out << "  dt -> " << format_double(d.dt) << " at t=" << format_double(d.t) << " (" << d.reason << ")\n";
    }
    return exit_ok;
}

inline int cmd_audit(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    Trajectory coarse;
    ExperimentReport r = run_energy_audit(initial_state(c), c.params, c.stepper(), c.experiment.audit_anchor, &coarse);
    const auto csv = output_path(opt, c.output.csv_path);
    write_trajectory_csv(csv, coarse.rows);
    r.artifacts.push_back(csv.string());
    return finish_report(r, opt, out);
}

inline PerturbationSpec perturbation_from(const RunConfig& c, double epsilon, double band, PerturbTarget target)
{
    PerturbationSpec s;
    s.seed = c.experiment.perturb_seed >= 0 ? static_cast<std::uint64_t>(c.experiment.perturb_seed) : c.seed + 1;
    s.amplitude = epsilon;
    s.band = band;
    s.target = target;
    return s;
}

inline int cmd_perturb(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    const auto& x = c.experiment;
    DependenceConfig dc;
    dc.horizon = c.t_end;
    dc.dt = c.dt;
    dc.sample_every = c.output.sample_every;
    dc.cfl_safety = c.cfl_safety;
    SeparationTrace trace;
    ExperimentReport r = continuous_dependence(
        initial_state(c), perturbation_from(c, x.perturb_epsilon, x.perturb_band, x.perturb_target), c.params, dc, &trace);
    if (!trace.t.empty()) {
        std::string text = "t,S_eps,S_2eps\n";
        for (std::size_t i = 0; i < trace.t.size(); ++i) {
            text += format_double(trace.t[i]) + ',' + format_double(trace.s_eps[i]) + ',' + format_double(trace.s_2eps[i]) + '\n';
        }
        const auto path = output_path(opt, "separation.csv");
        write_text(path, text);
        r.artifacts.push_back(path.string());
    }
    return finish_report(r, opt, out);
}

inline RandomInit random_init_from(const RunConfig& c)
{
    RandomInit ri;
    ri.seed = c.seed;
    ri.band = c.init.band;
    ri.mean_director = c.init.mean_director;
    ri.velocity = c.init.velocity;
    ri.director = c.init.director_fluctuation;
    return ri;
}

inline int cmd_absorb(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    const auto& x = c.experiment;
    EnsembleConfig ec;
    ec.horizon = c.t_end;
    ec.dt = c.dt;
    ec.sample_every = c.output.sample_every;
    ec.cfl_safety = c.cfl_safety;
    ec.tail_fraction = x.tail_fraction;
    ec.ball_slack = x.ball_slack;
    std::vector<EnsembleMember> members;
    ExperimentReport r = dissipativity_ensemble(x.radii, c.params, GridSpec(c.grid_n), random_init_from(c), ec, &members);
    std::string text = "member,t,Q,E\n";
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& m = members[k];
        for (std::size_t i = 0; i < m.t.size(); ++i) {
            text += std::to_string(k) + ',' + format_double(m.t[i]) + ',' + format_double(m.q[i]) + ',' +
                    format_double(i < m.energy.size() ? m.energy[i] : std::nan("")) + '\n';
        }
    }
    const auto path = output_path(opt, "ensemble.csv");
    write_text(path, text);
    r.artifacts.push_back(path.string());
    return finish_report(r, opt, out);
}

inline int cmd_smooth(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    const auto& x = c.experiment;
    SmoothingConfig sc;
    sc.pre_time = x.smooth_pre_time;
    sc.dt = c.dt;
    sc.sample_every = c.output.sample_every;
    sc.cfl_safety = c.cfl_safety;
    std::vector<PerturbationSpec> perts;
    for (double eps : x.smooth_epsilons) perts.push_back(perturbation_from(c, eps, x.smooth_band, x.smooth_target));
    ExperimentReport r = smoothing_ratio(initial_state(c), perts, c.params, sc);
    return finish_report(r, opt, out);
}

inline int cmd_equilibrate(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    EquilibrateConfig ec;
    ec.dt = c.dt;
    ec.sample_every = c.output.sample_every;
    ec.cfl_safety = c.cfl_safety;
    Trajectory t;
    ExperimentReport r = equilibrate(initial_state(c), c.params, c.experiment.tol, c.t_end, ec, &t);
    if (!t.rows.empty()) {
        const auto csv = output_path(opt, c.output.csv_path);
        write_trajectory_csv(csv, t.rows);
        r.artifacts.push_back(csv.string());
    }
    return finish_report(r, opt, out);
}

inline int cmd_mms(const RunConfig& c, const CliOptions& opt, std::ostream& out)
{
    const auto& x = c.experiment;
    MmsConfig mc;
    mc.t_final = x.mms_t_final;
    ManufacturedSolution ms;
    ms.velocity_amplitude = x.mms_velocity_amplitude;
    ms.director_amplitude = x.mms_director_amplitude;
    ExperimentReport r = mms_convergence(c.params, x.mms_dt, x.mms_n, mc, ms);
    return finish_report(r, opt, out);
}

} // namespace nlc

#endif // NLC_CLI_HPP
