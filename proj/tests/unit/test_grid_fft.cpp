#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <nlc/fft.hpp>
#include <nlc/grid.hpp>

using namespace nlc;

TEST(GridSpec, RejectsOddOrSmallSizes)
{
    EXPECT_THROW(GridSpec(7), std::invalid_argument);
    EXPECT_THROW(GridSpec(6), std::invalid_argument);
    EXPECT_THROW(GridSpec(0), std::invalid_argument);
    EXPECT_NO_THROW(GridSpec(8));
}

TEST(GridSpec, SpacingAndNodes)
{
    const GridSpec g(32);
    EXPECT_DOUBLE_EQ(g.spacing(), 1.0 / 32);
    EXPECT_DOUBLE_EQ(g.period(), 1.0);
    EXPECT_DOUBLE_EQ(g.x(5), 5.0 / 32);
    EXPECT_DOUBLE_EQ(g.y(31), 31.0 / 32);
}

TEST(GridSpec, ZeroFrequencyAppearsOncePerAxis)
{
    const GridSpec g(16);
    int zeros = 0, nyquist = 0;
    for (int m = 0; m < g.n(); ++m) {
        zeros += g.ky(m) == 0;
        nyquist += g.is_nyquist(g.ky(m));
        EXPECT_GE(g.ky(m), -8);
        EXPECT_LE(g.ky(m), 7);
    }
    EXPECT_EQ(zeros, 1);
    EXPECT_EQ(nyquist, 1);
    EXPECT_EQ(g.kx(g.spectral_cols() - 1), -8);
}

class RoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(RoundTrip, InverseOfForwardReproducesValues)
{
    const GridSpec g(GetParam());
    std::mt19937_64 rng(GetParam());
    std::normal_distribution<double> normal;
    ScalarField f(g);
    for (double& x : f.values) x = normal(rng);
    const ScalarField back = inverse(forward(f));
    EXPECT_LE(max_abs_diff(back, f) / f.max_abs(), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Sizes, RoundTrip, ::testing::Values(8, 16, 32, 64));

TEST(Forward, NormalizedSoConstantIsMeanMode)
{
    const GridSpec g(16);
    const Spectrum s = forward(ScalarField(g, 2.5));
    EXPECT_NEAR(s(0, 0).real(), 2.5, 1e-14);
    double rest = 0.0;
    for (std::size_t k = 1; k < s.c.size(); ++k) rest = std::max(rest, std::abs(s.c[k]));
    EXPECT_LE(rest, 1e-14);
}

TEST(Forward, SingleCosineSplitsBetweenConjugates)
{
    const GridSpec g(16);
    const auto f = ScalarField::sample(g, [](double x, double y) { return std::cos(two_pi * (3 * x + 2 * y)); });
    const Spectrum s = forward(f);
    // stored half plane holds (kx=3, ky=2) with amplitude 1/2
    EXPECT_NEAR(std::abs(s(2, 3)), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(s(14, 3)), 0.0, 1e-14);
}

TEST(Forward, DoesNotModifyInput)
{
    const GridSpec g(8);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = std::sin(0.3 * k);
    const ScalarField copy = f;
    (void)forward(f);
    EXPECT_EQ(f.values, copy.values);
}

TEST(ColumnWeight, CountsConjugatePairsTwice)
{
    const GridSpec g(8);
    EXPECT_EQ(column_weight(g, 0), 1.0);
    EXPECT_EQ(column_weight(g, 1), 2.0);
    EXPECT_EQ(column_weight(g, 3), 2.0);
    EXPECT_EQ(column_weight(g, 4), 1.0);
}
