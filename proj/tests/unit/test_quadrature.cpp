#include "pdarcy/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace pdarcy;

TEST(GaussLegendre, WeightsSumToTwo)
{
    for (int order : {1, 2, 5, 16, 64}) {
        const auto& rule = gauss_legendre(order);
        ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(order));
        double sum = 0.0;
        for (double w : rule.weights) {
            sum += w;
        }
        EXPECT_NEAR(sum, 2.0, 1e-14) << "order " << order;
    }
}

TEST(GaussLegendre, TwoPointNodes)
{
    const auto& rule = gauss_legendre(2);
    EXPECT_NEAR(std::abs(rule.nodes[0]), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(rule.weights[0], 1.0, 1e-15);
}

TEST(GaussLegendre, ExactForDegree2nMinus1)
{
    // int_0^1 x^7 dx = 1/8, exact with 4 points
    EXPECT_NEAR(integrate([](double x) { return std::pow(x, 7); }, 0.0, 1.0, 4), 0.125, 1e-15);
    // degree 8 is not exact with 4 points
    EXPECT_GT(std::abs(integrate([](double x) { return std::pow(x, 8); }, 0.0, 1.0, 4) - 1.0 / 9.0), 1e-8);
}

TEST(GaussLegendre, RejectsBadOrder)
{
    EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
    EXPECT_THROW(gauss_legendre(65), std::invalid_argument);
}

TEST(Integrate, CompositeConvergesForSmoothIntegrand)
{
    const double exact = 2.0 / std::numbers::pi;
    EXPECT_NEAR(integrate([](double x) { return std::sin(std::numbers::pi * x); }, 0.0, 1.0, 4, 16), exact, 1e-12);
}

TEST(Integrate, PiecewiseHandlesKinks)
{
    const std::vector<double> breaks = {-1.0, 0.0, 1.0};
    EXPECT_NEAR(integrate_piecewise([](double x) { return std::abs(x); }, breaks, 2), 1.0, 1e-15);
}

TEST(TriangleRule, IntegratesMonomials)
{
    // int over the reference triangle of x^a y^b = a! b! / (a + b + 2)!
    const std::array<double, 2> p0{0.0, 0.0}, p1{1.0, 0.0}, p2{0.0, 1.0};
    EXPECT_NEAR(integrate_triangle([](double, double) { return 1.0; }, p0, p1, p2), 0.5, 1e-15);
    EXPECT_NEAR(integrate_triangle([](double x, double y) { return x * y; }, p0, p1, p2), 1.0 / 24.0, 1e-15);
    EXPECT_NEAR(integrate_triangle([](double x, double y) { return x * x * y * y * y; }, p0, p1, p2, 4),
                2.0 * 6.0 / 5040.0, 1e-15);
}

TEST(TriangleRule, MapsToPhysicalTriangle)
{
    // area of (0,0), (2,0), (0,3) is 3; centroid x-coordinate 2/3
    const std::array<double, 2> p0{0.0, 0.0}, p1{2.0, 0.0}, p2{0.0, 3.0};
    EXPECT_NEAR(integrate_triangle([](double, double) { return 1.0; }, p0, p1, p2), 3.0, 1e-14);
    EXPECT_NEAR(integrate_triangle([](double x, double) { return x; }, p0, p1, p2), 2.0, 1e-14);
}
