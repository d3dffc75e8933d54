#ifndef NLC_CONFIG_HPP
#define NLC_CONFIG_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"

namespace nlc {

/// Invalid configuration; the message names the offending key path.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InitConfig {
    std::string type = "zero";  // zero | taylor_green | constant_director | mode_director | random
    double amplitude = 1.0;
    std::array<double, 2> director{1.0, 0.0};
    int m = 1;
    int n = 0;
    double phase = 0.0;
    double energy = 1.0;
    double band = -1.0;
    std::array<double, 2> mean_director{1.0, 0.0};
    bool velocity = true;
    bool director_fluctuation = true;
};

struct OutputConfig {
    std::string csv_path = "trajectory.csv";
    long sample_every = 1;
    long snapshot_every = 0;
    std::string snapshot_dir = "snapshots";
};

/// Per-subcommand knobs; each lives under its own object in the config.
struct ExperimentOptions {
    double audit_anchor = std::numeric_limits<double>::quiet_NaN();

    double perturb_epsilon = 1e-5;
    double perturb_band = 0.0;
    PerturbTarget perturb_target = PerturbTarget::director;
    std::int64_t perturb_seed = -1;  // < 0: config seed + 1

    std::vector<double> radii{1.0, 10.0, 100.0};
    double tail_fraction = 0.2;
    double ball_slack = 0.01;

    std::vector<double> smooth_epsilons{1e-6, 1e-5, 1e-4};
    double smooth_pre_time = 10.0;
    double smooth_band = 2.0;
    PerturbTarget smooth_target = PerturbTarget::both;

    double tol = 1e-8;

    std::vector<double> mms_dt{1e-3, 5e-4};
    std::vector<int> mms_n{32, 64};
    double mms_t_final = 0.5;
    double mms_velocity_amplitude = 1.0;
    double mms_director_amplitude = 0.1;
};

struct RunConfig {
    int grid_n = 0;
    double dt = 0.0;
    double t_end = 0.0;
    double cfl_safety = 0.5;
    ModelParams params;
    std::uint64_t seed = 0;
    InitConfig init;
    OutputConfig output;
    ExperimentOptions experiment;

    StepperConfig stepper() const
    {
        StepperConfig c;
        c.dt = dt;
        c.t_end = t_end;
        c.cfl_safety = cfl_safety;
        c.sample_every = output.sample_every;
        c.snapshot_every = output.snapshot_every;
        return c;
    }
};

namespace detail {

using json = nlohmann::json;

/// Walks one JSON object, tracking consumed keys so leftovers can be rejected.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& at(const std::string& key)
    {
        seen_.insert(key);
        return obj_.at(key);
    }

    void require(const std::string& key) const
    {
        if (!has(key)) throw ConfigError(key_path(key) + ": required key missing");
    }

    double number(const std::string& key, double fallback)
    {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
        return v.get<double>();
    }

    double number(const std::string& key)
    {
        require(key);
        return number(key, 0.0);
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback)
    {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) throw ConfigError(key_path(key) + ": expected a boolean");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::array<double, 2> pair(const std::string& key, std::array<double, 2> fallback)
    {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(key_path(key) + ": expected [x, y]");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }

    template <typename T>
    std::vector<T> list(const std::string& key, std::vector<T> fallback)
    {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_array() || v.empty()) throw ConfigError(key_path(key) + ": expected a nonempty array");
        std::vector<T> out;
        for (const auto& e : v) {
            if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer())) {
                throw ConfigError(key_path(key) + ": array entries must be numbers");
            }
            out.push_back(e.get<T>());
        }
        return out;
    }

    ObjectReader child(const std::string& key) { return ObjectReader(at(key), key_path(key)); }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()) + ": unknown key");
        }
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

inline PerturbTarget parse_target(const std::string& s, const std::string& path)
{
    if (s == "velocity") return PerturbTarget::velocity;
    if (s == "director") return PerturbTarget::director;
    if (s == "both") return PerturbTarget::both;
    throw ConfigError(path + ": expected one of velocity, director, both");
}

/// Parses JSON, rejecting duplicate keys within any object.
inline json parse_strict(const std::string& text)
{
    std::vector<std::set<std::string>> scopes;
    std::string duplicate;
    auto callback = [&](int, json::parse_event_t event, json& parsed) {
        switch (event) {
        case json::parse_event_t::object_start: scopes.emplace_back(); break;
        case json::parse_event_t::object_end: scopes.pop_back(); break;
        case json::parse_event_t::key: {
            const auto key = parsed.get<std::string>();
            if (!scopes.back().insert(key).second && duplicate.empty()) duplicate = key;
            break;
        }
        default: break;
        }
        return true;
    };
    json doc;
    try {
        doc = json::parse(text, callback);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!duplicate.empty()) throw ConfigError(duplicate + ": duplicate key");
    return doc;
}

inline InitConfig parse_init(ObjectReader r)
{
    InitConfig c;
    r.require("type");
    c.type = r.string("type", c.type);
    if (c.type == "zero") {
    } else if (c.type == "taylor_green") {
        c.amplitude = r.number("amplitude", c.amplitude);
        c.director = r.pair("director", c.director);
    } else if (c.type == "constant_director") {
        r.require("director");
        c.director = r.pair("director", c.director);
    } else if (c.type == "mode_director") {
        c.m = static_cast<int>(r.integer("m", c.m));
        c.n = static_cast<int>(r.integer("n", c.n));
        c.phase = r.number("phase", c.phase);
    } else if (c.type == "random") {
        c.energy = r.number("energy", c.energy);
        c.band = r.number("band", c.band);
        c.mean_director = r.pair("mean_director", c.mean_director);
        c.velocity = r.boolean("velocity", c.velocity);
        c.director_fluctuation = r.boolean("director", c.director_fluctuation);
        if (!(c.energy >= 0.0)) throw ConfigError(r.key_path("energy") + ": must be >= 0");
    } else {
        throw ConfigError(r.key_path("type") +
                          ": expected one of zero, taylor_green, constant_director, mode_director, random");
    }
    r.finish();
    return c;
}

inline void parse_experiments(ObjectReader& root, ExperimentOptions& x)
{
    if (root.has("audit")) {
        auto r = root.child("audit");
        x.audit_anchor = r.number("anchor", x.audit_anchor);
        r.finish();
    }
    if (root.has("perturb")) {
        auto r = root.child("perturb");
        x.perturb_epsilon = r.number("epsilon", x.perturb_epsilon);
        x.perturb_band = r.number("band", x.perturb_band);
        if (r.has("target")) x.perturb_target = parse_target(r.string("target", ""), r.key_path("target"));
        x.perturb_seed = r.integer("seed", x.perturb_seed);
        if (!(x.perturb_epsilon >= 0.0)) throw ConfigError(r.key_path("epsilon") + ": must be >= 0");
        r.finish();
    }
    if (root.has("absorb")) {
        auto r = root.child("absorb");
        x.radii = r.list<double>("radii", x.radii);
        x.tail_fraction = r.number("tail_fraction", x.tail_fraction);
        x.ball_slack = r.number("ball_slack", x.ball_slack);
        if (!(x.tail_fraction > 0.0 && x.tail_fraction < 1.0)) {
            throw ConfigError(r.key_path("tail_fraction") + ": must lie in (0,1)");
        }
        r.finish();
    }
    if (root.has("smooth")) {
        auto r = root.child("smooth");
        x.smooth_epsilons = r.list<double>("epsilons", x.smooth_epsilons);
        x.smooth_pre_time = r.number("pre_time", x.smooth_pre_time);
        x.smooth_band = r.number("band", x.smooth_band);
        if (r.has("target")) x.smooth_target = parse_target(r.string("target", ""), r.key_path("target"));
        r.finish();
    }
    if (root.has("equilibrate")) {
        auto r = root.child("equilibrate");
        x.tol = r.number("tol", x.tol);
        if (!(x.tol > 0.0)) throw ConfigError(r.key_path("tol") + ": must be > 0");
        r.finish();
    }
    if (root.has("mms")) {
        auto r = root.child("mms");
        x.mms_dt = r.list<double>("dt_list", x.mms_dt);
        x.mms_n = r.list<int>("n_list", x.mms_n);
        x.mms_t_final = r.number("t_final", x.mms_t_final);
        x.mms_velocity_amplitude = r.number("velocity_amplitude", x.mms_velocity_amplitude);
        x.mms_director_amplitude = r.number("director_amplitude", x.mms_director_amplitude);
        r.finish();
    }
}

} // namespace detail

/** Parses and validates a run configuration.
 *
 * Required keys: grid_n, dt, t_end, alpha, eta, init. Defaults follow the
 * unit normalization nu = lambda = gamma = 1.
 */
inline RunConfig parse_config(const std::string& text)
{
    const auto doc = detail::parse_strict(text);
    detail::ObjectReader r(doc, "");
    RunConfig c;

    for (const char* key : {"grid_n", "dt", "t_end", "alpha", "eta", "init"}) r.require(key);
    const auto n = r.integer("grid_n", 0);
    if (n < 8 || n % 2 != 0 || n > (1 << 14)) throw ConfigError("grid_n: must be an even integer >= 8");
    c.grid_n = static_cast<int>(n);
    c.dt = r.number("dt");
    c.t_end = r.number("t_end");
    c.cfl_safety = r.number("cfl_safety", c.cfl_safety);
    if (!(c.dt > 0.0)) throw ConfigError("dt: must be > 0");
    if (!(c.t_end >= 0.0)) throw ConfigError("t_end: must be >= 0");
    if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) throw ConfigError("cfl_safety: must lie in (0,1]");

    ModelParams& p = c.params;
    p.nu = r.number("nu", p.nu);
    p.lambda = r.number("lambda", p.lambda);
    p.gamma = r.number("gamma", p.gamma);
    p.alpha = r.number("alpha");
    p.eta = r.number("eta");
    p.dealias = r.boolean("dealias", p.dealias);
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw ConfigError("alpha: must lie in the range [0,1]");
    if (!(p.eta > 0.0 && p.eta <= 1.0)) throw ConfigError("eta: must lie in the range (0,1]");
    if (!(p.nu > 0.0)) throw ConfigError("nu: must be > 0");
    if (!(p.gamma > 0.0)) throw ConfigError("gamma: must be > 0");
    if (!(p.lambda >= 0.0)) throw ConfigError("lambda: must be >= 0");

    const auto seed = r.integer("seed", 0);
    if (seed < 0) throw ConfigError("seed: must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);

    c.init = detail::parse_init(r.child("init"));

    if (r.has("output")) {
        auto o = r.child("output");
        c.output.csv_path = o.string("csv_path", c.output.csv_path);
        c.output.sample_every = o.integer("sample_every", c.output.sample_every);
        c.output.snapshot_every = o.integer("snapshot_every", c.output.snapshot_every);
        c.output.snapshot_dir = o.string("snapshot_dir", c.output.snapshot_dir);
        if (c.output.sample_every < 1) throw ConfigError(o.key_path("sample_every") + ": must be >= 1");
        if (c.output.snapshot_every < 0) throw ConfigError(o.key_path("snapshot_every") + ": must be >= 0");
        if (c.output.csv_path.empty()) throw ConfigError(o.key_path("csv_path") + ": must be nonempty");
        if (c.output.snapshot_every > 0 && c.output.snapshot_dir.empty()) {
            throw ConfigError(o.key_path("snapshot_dir") + ": must be nonempty when snapshot_every > 0");
        }
        o.finish();
    }
    detail::parse_experiments(r, c.experiment);
    r.finish();
    return c;
}

/// Builds the initial state described by the config.
inline State initial_state(const RunConfig& c)
{
    const GridSpec g(c.grid_n);
    const InitConfig& in = c.init;
    if (in.type == "zero") return zero_state(g);
    if (in.type == "taylor_green") return taylor_green(g, in.amplitude, in.director);
    if (in.type == "constant_director") return constant_director(g, in.director);
    if (in.type == "mode_director") return mode_director(g, in.m, in.n, in.phase);
    RandomInit ri;
    ri.seed = c.seed;
    ri.energy = in.energy;
    ri.band = in.band;
    ri.mean_director = in.mean_director;
    ri.velocity = in.velocity;
    ri.director = in.director_fluctuation;
    return random_state(g, c.params, ri);
}

} // namespace nlc

#endif // NLC_CONFIG_HPP
