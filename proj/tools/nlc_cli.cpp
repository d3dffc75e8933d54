// Command-line front end for the nematic flow solver.
//
//   nlc run|audit|perturb|absorb|smooth|equilibrate|mms --config cfg.json [--out dir] [--seed s] [--quiet]
//
// Exit status: 0 success/PASS, 1 error or FAIL, 2 inconclusive, 3 blow-up.

#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include <nlc/nlc.hpp>

namespace {

struct Overrides {
    std::string config;
    std::string out = ".";
    std::optional<std::int64_t> seed;
    bool quiet = false;
    std::optional<double> epsilon;
    std::optional<double> anchor;
    std::optional<double> tol;
    std::optional<double> t_max;
    std::vector<double> radii;
    std::vector<double> dt_list;
    std::vector<int> n_list;
};

void apply(const Overrides& o, nlc::RunConfig& c)
{
    if (o.seed) {
        if (*o.seed < 0) throw nlc::ConfigError("--seed: must be >= 0");
        c.seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (o.epsilon) c.experiment.perturb_epsilon = *o.epsilon;
    if (o.anchor) c.experiment.audit_anchor = *o.anchor;
    if (o.tol) c.experiment.tol = *o.tol;
    if (o.t_max) c.t_end = *o.t_max;
    if (!o.radii.empty()) c.experiment.radii = o.radii;
    if (!o.dt_list.empty()) c.experiment.mms_dt = o.dt_list;
    if (!o.n_list.empty()) c.experiment.mms_n = o.n_list;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pseudo-spectral solver and experiment driver for 2D nematic liquid crystal flow"};
    app.require_subcommand(1);

    Overrides o;
    using Command = std::function<int(const nlc::RunConfig&, const nlc::CliOptions&, std::ostream&)>;
    const std::map<std::string, std::pair<std::string, Command>> commands{
        {"run", {"integrate and write the trajectory CSV and snapshots", nlc::cmd_run}},
        {"audit", {"energy-law residual audit with a dt-halving rerun", nlc::cmd_audit}},
        {"perturb", {"continuous dependence on initial data", nlc::cmd_perturb}},
        {"absorb", {"absorbing-ball ensemble over initial radii", nlc::cmd_absorb}},
        {"smooth", {"smoothing ratio of small separations", nlc::cmd_smooth}},
        {"equilibrate", {"integrate until stationary or t_end", nlc::cmd_equilibrate}},
        {"mms", {"manufactured-solution convergence", nlc::cmd_mms}},
    };

    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "overrides the config seed");
        sub->add_flag("--quiet", o.quiet, "print only the summary line");
        subs[name] = sub;
    }
    subs["audit"]->add_option("--anchor", o.anchor, "bound on the coarse max residual");
    subs["perturb"]->add_option("--epsilon", o.epsilon, "perturbation amplitude");
    subs["absorb"]->add_option("--radii", o.radii, "initial energies")->delimiter(',');
    subs["equilibrate"]->add_option("--tol", o.tol, "stationarity tolerance");
    subs["equilibrate"]->add_option("--t-max", o.t_max, "integration limit (overrides t_end)");
    subs["mms"]->add_option("--dt-list", o.dt_list, "time steps")->delimiter(',');
    subs["mms"]->add_option("--n-list", o.n_list, "grid sizes")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? nlc::exit_ok : nlc::exit_error;
    }

    try {
        for (const auto& [name, entry] : commands) {
            if (!subs[name]->parsed()) continue;
            nlc::RunConfig config = nlc::parse_config(nlc::read_text(o.config));
            apply(o, config);
            nlc::CliOptions opt{o.out, o.quiet};
            std::filesystem::create_directories(opt.out_dir);
            return entry.second(config, opt, std::cout);
        }
    } catch (const nlc::BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << '\n';
        return nlc::exit_blow_up;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nlc::exit_error;
    }
    return nlc::exit_error;
}
