#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include <nlc/initial.hpp>
#include <nlc/integrator.hpp>

using namespace nlc;

namespace {

ModelParams unit_params(double alpha = 0.5, double eta = 1.0)
{
    ModelParams p;
    p.alpha = alpha;
    p.eta = eta;
    return p;
}

/// |d(t)|^2 for d' = -gamma eta^-2 (|d|^2 - 1) d from a constant start of length r0.
double logistic(double r0, double t, double gamma = 1.0, double eta = 1.0)
{
    const double u0 = (r0 * r0 - 1.0) / (r0 * r0);
    return 1.0 / (1.0 - u0 * std::exp(-2.0 * gamma * t / (eta * eta)));
}

double length_sq_error(const State& s, double exact)
{
    double e = 0.0;
    for (std::size_t k = 0; k < s.d[0].size(); ++k) {
        const double dx = s.d[0].values[k], dy = s.d[1].values[k];
        e = std::max(e, std::abs(dx * dx + dy * dy - exact));
    }
    return e;
}

} // namespace

TEST(Step, ZeroStateIsFixed)
{
    const GridSpec g(16);
    const State s = step(zero_state(g), unit_params(), 0.1);
    EXPECT_EQ(s.v.max_abs(), 0.0);
    EXPECT_EQ(s.d.max_abs(), 0.0);
    EXPECT_DOUBLE_EQ(s.t, 0.1);
}

TEST(Step, LogisticSingleStep)
{
    const GridSpec g(8);
    const State s = step(constant_director(g, {0.5, 0.0}), unit_params(), 1e-3);
    EXPECT_LE(length_sq_error(s, logistic(0.5, 1e-3)), 1e-9);
}

TEST(Step, LogisticLocalErrorIsThirdOrder)
{
    const GridSpec g(8);
    const ModelParams p = unit_params();
    const double e1 = length_sq_error(step(constant_director(g, {0.5, 0.0}), p, 2e-2), logistic(0.5, 2e-2));
    const double e2 = length_sq_error(step(constant_director(g, {0.5, 0.0}), p, 1e-2), logistic(0.5, 1e-2));
    EXPECT_GE(e1 / e2, 7.0);
}

TEST(Step, RejectsNonPositiveDtAndNonFiniteInput)
{
    const GridSpec g(8);
    EXPECT_THROW(step(zero_state(g), unit_params(), 0.0), std::invalid_argument);
    State bad = zero_state(g);
    bad.d[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(step(bad, unit_params(), 1e-3), BlowUpError);
}

TEST(Step, RejectsDtFarAboveCflBound)
{
    const GridSpec g(32);
    const State s = taylor_green(g, 10.0);
    const double bound = cfl_dt(s, unit_params(), 1.0);
    EXPECT_THROW(step(s, unit_params(), 11.0 * bound), CflViolation);
    EXPECT_NO_THROW(step(s, unit_params(), 5.0 * bound));
}

TEST(Step, PreservesDivergenceAndMean)
{
    const GridSpec g(32);
    RandomInit init;
    init.seed = 2;
    const State s = step(random_state(g, unit_params(0.3, 0.7), init), unit_params(0.3, 0.7), 1e-3);
    EXPECT_LE(max_spectral_divergence(s.v), 1e-10);
    EXPECT_LE(std::abs(s.v[0].mean()) + std::abs(s.v[1].mean()), 1e-12);
}

TEST(CflDt, QuiescentGuard)
{
    const GridSpec g(64);
    EXPECT_DOUBLE_EQ(cfl_dt(zero_state(g), unit_params(), 0.5), 0.5 / 64 / 1e-8);
}

TEST(CflDt, UnitSpeed)
{
    const GridSpec g(64);
    State s = zero_state(g);
    s.v[0] = ScalarField(g, 1.0);
    EXPECT_DOUBLE_EQ(cfl_dt(s, unit_params(), 0.5), 0.5 / 64);
}

TEST(CflDt, DoublingNHalvesBound)
{
    const double a = cfl_dt(taylor_green(GridSpec(32), 1.0), unit_params(), 0.5);
    const double b = cfl_dt(taylor_green(GridSpec(64), 1.0), unit_params(), 0.5);
    EXPECT_NEAR(a / b, 2.0, 1e-12);
}

TEST(Simulate, ZeroHorizonGivesOneRow)
{
    const GridSpec g(8);
    StepperConfig c;
    c.t_end = 0.0;
    const Trajectory t = simulate(constant_director(g, {1.0, 0.0}), unit_params(), c);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].t, 0.0);
    EXPECT_EQ(t.steps, 0);
}

TEST(Simulate, EquilibriumRowsAreIdentical)
{
    const GridSpec g(16);
    StepperConfig c;
    c.dt = 1e-2;
    c.t_end = 0.5;
    c.sample_every = 5;
    const Trajectory t = simulate(constant_director(g, {0.0, 1.0}), unit_params(), c);
    ASSERT_GE(t.rows.size(), 10u);
    for (const auto& r : t.rows) {
        EXPECT_EQ(r.energy.total, 0.0);
        EXPECT_EQ(r.norm_d_h2, t.rows[0].norm_d_h2);
    }
}

TEST(Simulate, RowsIncreaseAndEndAtFinalTime)
{
    const GridSpec g(16);
    StepperConfig c;
    c.dt = 3e-3;
    c.t_end = 0.1;
    c.sample_every = 7;
    const Trajectory t = simulate(taylor_green(g, 1.0), unit_params(), c);
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GT(t.rows[i].t, t.rows[i - 1].t);
    EXPECT_DOUBLE_EQ(t.rows.back().t, 0.1);
    EXPECT_DOUBLE_EQ(t.final_state.t, 0.1);
    EXPECT_TRUE(std::isnan(t.rows.front().residual));
    EXPECT_TRUE(std::isnan(t.rows.back().residual));
}

TEST(Simulate, SnapshotCadenceIncludesStepZero)
{
    const GridSpec g(8);
    StepperConfig c;
    c.dt = 1e-3;
    c.t_end = 0.25;
    c.snapshot_every = 100;
    const Trajectory t = simulate(taylor_green(g, 1.0), unit_params(), c);
    ASSERT_EQ(t.snapshots.size(), 3u);
    EXPECT_EQ(t.snapshots[0].step, 0);
    EXPECT_EQ(t.snapshots[1].step, 100);
    EXPECT_EQ(t.snapshots[2].step, 200);
}

TEST(Simulate, TaylorGreenKineticEnergyDecay)
{
    ModelParams p = unit_params();
    p.nu = 0.01;
    p.lambda = 0.0;
    StepperConfig c;
    c.dt = 1e-4;
    c.t_end = 0.05;
    c.sample_every = 50;
    const Trajectory t = simulate(taylor_green(GridSpec(32), 1.0), p, c);
    for (const auto& r : t.rows) {
        const double exact = 0.25 * std::exp(-16.0 * M_PI * M_PI * p.nu * r.t);
        EXPECT_LE(std::abs(r.energy.kinetic - exact) / exact, 1e-6);
    }
}

TEST(Simulate, LogisticGlobalErrorIsSecondOrder)
{
    const GridSpec g(8);
    auto error = [&](double dt) {
        StepperConfig c;
        c.dt = dt;
        c.t_end = 1.0;
        c.sample_every = 1000;
        return length_sq_error(simulate(constant_director(g, {0.5, 0.0}), unit_params(), c).final_state,
                               logistic(0.5, 1.0));
    };
    EXPECT_GE(error(4e-3) / error(2e-3), 3.5);
}

TEST(Simulate, EnergyNonIncreasingAndInvariantsHold)
{
    const GridSpec g(32);
    const ModelParams p = unit_params(0.3, 0.8);
    RandomInit init;
    init.seed = 4;
    StepperConfig c;
    c.dt = 1e-3;
    c.t_end = 0.2;
    c.sample_every = 1;
    const State s0 = random_state(g, p, init);
    double max_div = 0.0;
    const Trajectory t = simulate(s0, p, c, {}, [&](long, const SpectralState& s) {
        max_div = std::max(max_div, spectral::max_magnitude(spectral::divergence(s.v[0], s.v[1])));
        EXPECT_LE(std::abs(s.v[0](0, 0)) + std::abs(s.v[1](0, 0)), 1e-12);
        return true;
    });
    const double tol = 1e-8 * (1.0 + t.rows.front().energy.total);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        EXPECT_LE(t.rows[i].energy.total, t.rows[i - 1].energy.total + tol);
    }
    EXPECT_LE(max_div, 1e-10);
}

TEST(Simulate, DeterministicBitwise)
{
    const GridSpec g(16);
    const ModelParams p = unit_params(0.2, 0.6);
    RandomInit init;
    init.seed = 8;
    StepperConfig c;
    c.dt = 2e-3;
    c.t_end = 0.1;
    const State s0 = random_state(g, p, init);
    const Trajectory a = simulate(s0, p, c), b = simulate(s0, p, c);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].energy.total, b.rows[i].energy.total);
    EXPECT_EQ(a.final_state.d[0].values, b.final_state.d[0].values);
    EXPECT_EQ(a.final_state.v[1].values, b.final_state.v[1].values);
}

TEST(Simulate, ObserverCanStopEarly)
{
    const GridSpec g(8);
    StepperConfig c;
    c.dt = 1e-2;
    c.t_end = 1.0;
    int calls = 0;
    const Trajectory t = simulate(taylor_green(g, 1.0), unit_params(), c, {}, [&](long step, const SpectralState&) {
        ++calls;
        return step < 3;
    });
    EXPECT_EQ(calls, 4);
    EXPECT_EQ(t.steps, 3);
}

TEST(Simulate, CflHalvingIsRecorded)
{
    const GridSpec g(16);
    StepperConfig c;
    c.dt = 0.05;
    c.t_end = 0.1;
    c.cfl_safety = 0.5;
    const Trajectory t = simulate(taylor_green(g, 1.0), unit_params(), c);
    ASSERT_FALSE(t.dt_changes.empty());
    EXPECT_EQ(t.dt_changes.front().reason, "cfl");
    EXPECT_LE(t.dt_changes.front().dt, 0.5 / 16);
    EXPECT_FALSE(t.blew_up);
}

TEST(Simulate, BlowUpIsMarkedWithPartialTrajectory)
{
    const GridSpec g(16);
    StepperConfig c;
    c.dt = 0.01;
    c.t_end = 1.0;
    const Trajectory t = simulate(constant_director(g, {2.0, 0.0}), unit_params(0.5, 0.001), c);
    EXPECT_TRUE(t.blew_up);
    EXPECT_FALSE(t.blow_up_message.empty());
    EXPECT_FALSE(t.rows.empty());
    int halvings = 0;
    for (const auto& d : t.dt_changes) halvings += d.reason == "non-finite";
    EXPECT_EQ(halvings, max_dt_halvings);
}

TEST(Simulate, ForcingIsApplied)
{
    const GridSpec g(8);
    StepperConfig c;
    c.dt = 1e-2;
    c.t_end = 0.1;
    // constant director forcing on a zero state: d grows linearly
    const Forcing push = [&](double) { return std::make_pair(VectorField2(g), VectorField2(g, 1.0, 0.0)); };
    ModelParams p = unit_params();
    const Trajectory t = simulate(constant_director(g, {1.0, 0.0}), p, c, push);
    EXPECT_GT(t.final_state.d[0](0, 0), 1.0);
    EXPECT_LE(t.final_state.v.max_abs(), 1e-15);
}

TEST(StepperConfig, Validation)
{
    StepperConfig c;
    c.dt = -1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = StepperConfig{};
    c.cfl_safety = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = StepperConfig{};
    c.sample_every = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(FillResiduals, CenteredDefect)
{
    std::vector<TrajectoryRow> rows(3);
    for (int i = 0; i < 3; ++i) {
        rows[i].t = 0.1 * i;
        rows[i].energy.total = 1.0 - 0.1 * i;  // dE/dt = -1
    }
    rows[1].energy.visc_dissipation = 0.6;
    rows[1].energy.rot_dissipation = 0.4;
    fill_residuals(rows);
    EXPECT_TRUE(std::isnan(rows[0].residual));
    EXPECT_NEAR(rows[1].residual, 0.0, 1e-14);
    EXPECT_TRUE(std::isnan(rows[2].residual));
}

TEST(Simulate, DecayedVelocityFlushesToZeroAndModeIsRestored)
{
    const GridSpec g(8);
    StepperConfig c;
    c.dt = 1e-2;
    c.t_end = 25.0;
    c.sample_every = 500;
    const Trajectory t = simulate(taylor_green(g, 1.0), unit_params(), c);
    EXPECT_EQ(t.final_state.v.max_abs(), 0.0);
    volatile double subnormal = 1e-310;
    EXPECT_GT(subnormal * 0.5, 0.0);
}
