#include "pdarcy/field1d.hpp"

#include "../support/random_fields.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pdarcy;

namespace {

PiecewiseField1D linear(double slope)
{
    return PiecewiseField1D({{-1.0, 1.0, [slope](double x) { return slope * (x + 1.0); }, [slope](double) { return slope; }}},
                            "linear");
}

PiecewiseField1D kinked()
{
    return PiecewiseField1D({{-1.0, 0.0, [](double x) { return x + 1.0; }, [](double) { return 1.0; }},
                             {0.0, 1.0, [](double) { return 1.0; }, [](double) { return 0.0; }}},
                            "kinked");
}

}  // namespace

TEST(PiecewiseField1D, EvaluatesPieces)
{
    const auto f = kinked();
    EXPECT_DOUBLE_EQ(f.value(-0.5), 0.5);
    EXPECT_DOUBLE_EQ(f.value(0.5), 1.0);
    EXPECT_DOUBLE_EQ(f.derivative(-0.5), 1.0);
    // breakpoints use the piece to the right
    EXPECT_DOUBLE_EQ(f.derivative(0.0), 0.0);
    EXPECT_EQ(f.piece_index(-1.0), 0u);
    EXPECT_EQ(f.piece_index(1.0), 1u);
    EXPECT_EQ(f.breakpoints(), (std::vector<double>{-1.0, 0.0, 1.0}));
    EXPECT_EQ(f.origin(), "kinked");
    EXPECT_LT(f.max_jump(), 1e-15);
}

TEST(PiecewiseField1D, ZeroField)
{
    const auto z = PiecewiseField1D::zero();
    EXPECT_EQ(z.value(0.3), 0.0);
    EXPECT_EQ(vnorm_1d(z), 0.0);
}

TEST(VNormDiff1D, Examples)
{
    const auto f = kinked();
    EXPECT_EQ(vnorm_diff_1d(f, f), 0.0);
    EXPECT_NEAR(vnorm_diff_1d(PiecewiseField1D::zero(), linear(1.0)), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(vnorm_diff_1d(f, linear(1.0)), 1.0, 1e-14);
}

TEST(Combine, MergesBreakpoints)
{
    const auto c = combine(kinked(), 2.0, linear(1.0), -1.0);
    EXPECT_EQ(merged_breakpoints(kinked(), linear(1.0)), (std::vector<double>{-1.0, 0.0, 1.0}));
    EXPECT_DOUBLE_EQ(c.value(-0.5), 0.5);
    EXPECT_DOUBLE_EQ(c.value(0.5), 2.0 - 1.5);
    EXPECT_DOUBLE_EQ(c.derivative(0.5), -1.0);
}

TEST(VInner1D, MatchesHandIntegral)
{
    // int_{-1}^{0} 1 * 2 = 2
    EXPECT_NEAR(vinner_1d(kinked(), linear(2.0)), 2.0, 1e-14);
}

TEST(RandomFields, AreContinuousMembersOfV)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto r = pdarcy::testing::random_piecewise_polynomial(rng);
        EXPECT_LT(r.max_jump(), 1e-10);
        EXPECT_EQ(r.value(-1.0), 0.0);
    }
}
