#include <cmath>

#include <gtest/gtest.h>

#include <nlc/experiments.hpp>

using namespace nlc;

namespace {

ModelParams params(double alpha = 0.5, double eta = 1.0)
{
    ModelParams p;
    p.alpha = alpha;
    p.eta = eta;
    return p;
}

double perturbation_norm_sq(const Perturbation& q)
{
    return std::pow(sobolev_norm(q.dv, 0.0), 2) + std::pow(sobolev_norm(q.dd, 1.0), 2);
}

Trajectory equilibrium_run(int rows)
{
    StepperConfig c;
    c.dt = 1e-2;
    c.t_end = 1e-2 * (rows - 1);
    return simulate(constant_director(GridSpec(8), {1.0, 0.0}), params(), c);
}

} // namespace

TEST(Perturbation, NormalizedToAmplitude)
{
    const GridSpec g(32);
    for (auto target : {PerturbTarget::velocity, PerturbTarget::director, PerturbTarget::both}) {
        PerturbationSpec spec;
        spec.seed = 3;
        spec.amplitude = 1e-4;
        spec.target = target;
        const Perturbation q = make_perturbation(g, spec);
        EXPECT_NEAR(std::sqrt(perturbation_norm_sq(q)), 1e-4, 1e-16);
        EXPECT_LE(max_spectral_divergence(q.dv), 1e-12);
    }
}

TEST(Perturbation, TargetSelectsComponents)
{
    const GridSpec g(16);
    PerturbationSpec spec;
    spec.target = PerturbTarget::director;
    EXPECT_EQ(make_perturbation(g, spec).dv.max_abs(), 0.0);
    spec.target = PerturbTarget::velocity;
    EXPECT_EQ(make_perturbation(g, spec).dd.max_abs(), 0.0);
}

TEST(Perturbation, BandZeroShiftsTheMeanOnly)
{
    const GridSpec g(16);
    PerturbationSpec spec;
    spec.band = 0.0;
    spec.target = PerturbTarget::director;
    const Perturbation q = make_perturbation(g, spec);
    EXPECT_LE(max_abs_diff(q.dd[0], ScalarField(g, q.dd[0].mean())), 1e-18);
    EXPECT_LE(max_abs_diff(q.dd[1], ScalarField(g, q.dd[1].mean())), 1e-18);
}

TEST(Perturbation, SameSeedSameShape)
{
    const GridSpec g(16);
    PerturbationSpec a, b;
    a.seed = b.seed = 9;
    b.amplitude = 2.0 * a.amplitude;
    const Perturbation qa = make_perturbation(g, a), qb = make_perturbation(g, b);
    EXPECT_LE(max_abs_diff(qa.dd * 2.0, qb.dd), 1e-20);
    EXPECT_LE(max_abs_diff(qa.dv * 2.0, qb.dv), 1e-20);
}

TEST(Perturbation, Validation)
{
    const GridSpec g(16);
    PerturbationSpec spec;
    spec.amplitude = -1.0;
    EXPECT_THROW(spec.validate(g), std::invalid_argument);
    spec = {};
    spec.band = 6.0;
    EXPECT_THROW(spec.validate(g), std::invalid_argument);
    spec = {};
    spec.band = 0.0;
    spec.target = PerturbTarget::velocity;
    EXPECT_THROW(spec.validate(g), std::invalid_argument);
}

TEST(EnergyAudit, NeedsThreeRows)
{
    EXPECT_THROW(energy_audit(equilibrium_run(2), params()), std::invalid_argument);
}

TEST(EnergyAudit, EquilibriumHasZeroResidual)
{
    const ExperimentReport r = energy_audit(equilibrium_run(5), params());
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.find("max_residual")->value, 0.0);
}

TEST(EnergyAudit, PairAtRoundoffFloorPassesWithNote)
{
    const ExperimentReport r = energy_audit(equilibrium_run(5), equilibrium_run(9), params());
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(std::isinf(r.find("residual_reduction")->value));
    EXPECT_FALSE(r.notes.empty());
}

TEST(EnergyAudit, AnchorIsJudged)
{
    const GridSpec g(16);
    RandomInit init;
    init.seed = 1;
    init.energy = 0.1;
    init.band = 1.0;
    StepperConfig c;
    c.dt = 1e-3;
    c.t_end = 0.05;
    const ExperimentReport r = run_energy_audit(random_state(g, params(), init), params(), c, 1e-30);
    EXPECT_EQ(r.status, Status::fail);
    EXPECT_FALSE(r.find("max_residual")->pass);
}

TEST(Dissipativity, EquilibriumMembersShareTheBall)
{
    const GridSpec g(8);
    EnsembleConfig cfg;
    cfg.horizon = 0.5;
    cfg.dt = 1e-2;
    cfg.sample_every = 5;
    std::vector<EnsembleMember> members;
    const ExperimentReport r = dissipativity_ensemble(
        {constant_director(g, {1.0, 0.0}), constant_director(g, {0.0, 1.0})}, params(), cfg, &members);
    ASSERT_EQ(members.size(), 2u);
    EXPECT_DOUBLE_EQ(r.find("tail_spread")->value, 1.0);
    EXPECT_EQ(r.find("latest_entry_time")->value, 0.0);
    EXPECT_NEAR(r.find("absorbing_radius")->value, 1.01, 1e-12);
    EXPECT_TRUE(members[0].envelope.flat);
}

TEST(Dissipativity, ZeroStateHasZeroTail)
{
    const GridSpec g(8);
    EnsembleConfig cfg;
    cfg.horizon = 0.2;
    cfg.dt = 1e-2;
    cfg.sample_every = 2;
    std::vector<EnsembleMember> members;
    dissipativity_ensemble({zero_state(g)}, params(), cfg, &members);
    EXPECT_EQ(members[0].tail_sup, 0.0);
}

TEST(Dissipativity, NarrowRadiiAddANote)
{
    EnsembleConfig cfg;
    cfg.horizon = 0.1;
    cfg.dt = 1e-2;
    cfg.sample_every = 2;
    RandomInit base;
    base.energy = 1e-3;
    const ExperimentReport r = dissipativity_ensemble({1e-3, 2e-3}, params(), GridSpec(8), base, cfg);
    bool noted = false;
    for (const auto& n : r.notes) noted |= n.find("decade") != std::string::npos;
    EXPECT_TRUE(noted);
    EXPECT_NE(r.find("member1_radius"), nullptr);
}

TEST(ContinuousDependence, ZeroEpsilonGivesZeroSeparation)
{
    PerturbationSpec pert;
    pert.amplitude = 0.0;
    SeparationTrace trace;
    const ExperimentReport r =
        continuous_dependence(constant_director(GridSpec(8), {1.0, 0.0}), pert, params(), {}, &trace);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.find("separation_max")->value, 0.0);
    for (double s : trace.s_eps) EXPECT_EQ(s, 0.0);
}

TEST(ContinuousDependence, LinearRegimeDoublingQuadruples)
{
    const GridSpec g(16);
    PerturbationSpec pert;
    pert.seed = 2;
    pert.amplitude = 1e-6;
    pert.band = 2.0;
    DependenceConfig cfg;
    cfg.horizon = 0.2;
    cfg.dt = 1e-3;
    cfg.sample_every = 20;
    SeparationTrace trace;
    const ExperimentReport r = continuous_dependence(constant_director(g, {1.0, 0.0}), pert, params(), cfg, &trace);
    EXPECT_NEAR(r.find("ratio_min")->value, 4.0, 1e-3);
    EXPECT_NEAR(r.find("ratio_max")->value, 4.0, 1e-3);
    EXPECT_NEAR(trace.s_eps.front(), 1e-12, 1e-20);
}

TEST(Smoothing, ZeroEpsilonIsRejected)
{
    PerturbationSpec pert;
    pert.amplitude = 0.0;
    EXPECT_THROW(smoothing_ratio(constant_director(GridSpec(8), {1.0, 0.0}), {pert}, params(), {}),
                 std::invalid_argument);
}

TEST(Smoothing, MovingBaseIsRejected)
{
    SmoothingConfig cfg;
    cfg.pre_time = 0.0;
    EXPECT_THROW(smoothing_ratio(taylor_green(GridSpec(16), 1.0), {PerturbationSpec{}}, params(), cfg),
                 PreconditionError);
}

TEST(Smoothing, RatioOnQuiescentBase)
{
    SmoothingConfig cfg;
    cfg.pre_time = 0.0;
    cfg.interval = 0.1;
    cfg.dt = 1e-3;
    PerturbationSpec a, b;
    a.amplitude = 1e-6;
    b.amplitude = 1e-5;
    std::vector<double> rho;
    const ExperimentReport r =
        smoothing_ratio(constant_director(GridSpec(16), {1.0, 0.0}), {a, b}, params(), cfg, &rho);
    ASSERT_EQ(rho.size(), 2u);
    EXPECT_GT(rho[0], 0.0);
    EXPECT_NEAR(rho[1] / rho[0], 1.0, 1e-3);
    EXPECT_TRUE(r.passed());
}

TEST(Equilibrate, EquilibriumConvergesAtStart)
{
    const ExperimentReport r = equilibrate(constant_director(GridSpec(8), {0.6, 0.8}), params(), 1e-8, 1.0, {});
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.find("t_converged")->value, 0.0);
}

TEST(Equilibrate, LogisticHittingTime)
{
    const double tol = 1e-8;
    const ExperimentReport r = equilibrate(constant_director(GridSpec(8), {0.5, 0.0}), params(), tol, 15.0, {});
    EXPECT_TRUE(r.passed());
    EXPECT_NEAR(r.find("t_converged")->value / (0.5 * std::log(3.0 / tol)), 1.0, 0.05);
    EXPECT_EQ(r.find("velocity_norm")->value, 0.0);
}

TEST(Equilibrate, ShortHorizonIsInconclusive)
{
    const ExperimentReport r = equilibrate(constant_director(GridSpec(8), {0.5, 0.0}), params(), 1e-8, 0.1, {});
    EXPECT_EQ(r.status, Status::inconclusive);
    EXPECT_FALSE(r.notes.empty());
}

TEST(Mms, ZeroAmplitudesGiveTheUniformDirectorRest)
{
    const GridSpec g(16);
    ManufacturedSolution ms{0.0, 0.0};
    const auto [fv, fd] = ms.forcing_at(g, params(), 0.3);
    EXPECT_LE(fv.max_abs(), 1e-14);
    EXPECT_LE(fd.max_abs(), 1e-14);
}

TEST(Mms, VelocityOnlyForcingIsTheDecayDefect)
{
    const GridSpec g(16);
    ModelParams p = params();
    p.lambda = 0.0;
    ManufacturedSolution ms{1.0, 0.0};
    const double t = 0.4;
    const auto [fv, fd] = ms.forcing_at(g, p, t);
    // v = cos t TG solves v_t = nu lap v - sin t TG - ... ; the Taylor-Green advection is a pure gradient
    const VectorField2 expected = taylor_green_velocity(g, -std::sin(t) + 8.0 * M_PI * M_PI * p.nu * std::cos(t));
    EXPECT_LE(max_abs_diff(fv, expected), 1e-10);
}

TEST(Mms, ExactAtStartAndSecondOrder)
{
    MmsConfig cfg;
    cfg.t_final = 0.1;
    const ExperimentReport r = mms_convergence(params(), {4e-3, 2e-3}, {16}, cfg);
    EXPECT_TRUE(r.passed()) << r.summary();
    EXPECT_NEAR(r.find("order_0")->value, 2.0, 0.2);
}

TEST(Mms, NeedsTwoTimeSteps)
{
    EXPECT_THROW(mms_convergence(params(), {1e-3}, {16}), std::invalid_argument);
}
