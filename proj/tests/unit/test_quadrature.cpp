#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "momentlab/error.hpp"
#include "momentlab/quadrature.hpp"
#include "momentlab/summation.hpp"

using namespace momentlab;

TEST(GaussKronrod, Polynomial)
{
    const auto res = quad::gauss_kronrod([](double x) { return x * x * x - x; }, 0.0, 2.0, 1e-14, 0.0);
    EXPECT_NEAR(res.value, 2.0, 1e-14);
}

TEST(GaussKronrod, Oscillatory)
{
    const auto res = quad::gauss_kronrod([](double x) { return std::cos(50.0 * x); }, 0.0, 1.0, 1e-12, 0.0);
    EXPECT_NEAR(res.value, std::sin(50.0) / 50.0, 1e-13);
}

TEST(GaussKronrod, GivesUp)
{
    EXPECT_THROW(quad::gauss_kronrod([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-12, 0.0, 50), ToleranceNotMet);
}

TEST(TanhSinh, EndpointSingularity)
{
    const auto res = quad::tanh_sinh([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, 1e-12, 0.0);
    EXPECT_NEAR(res.value, 10.0, 1e-9);
    const auto log_res = quad::tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0, 1e-13, 0.0);
    EXPECT_NEAR(log_res.value, -1.0, 1e-12);
}

TEST(AbsPower, UnitSquareMinusKink)
{
    // Integral over [1,2]^2 of |x-y|^r = 2/((r+1)(r+2)).
    for (double r : {1.0, 0.5, 0.1, -0.5, -0.9, 3.0}) {
        const auto res = quad::integrate_abs_power({{1, 2}, {1, 2}}, r, -1, nullptr, 1e-10);
        EXPECT_NEAR(res.value, 2.0 / ((r + 1.0) * (r + 2.0)), 1e-9 * res.value) << r;
    }
}

TEST(AbsPower, OffsetRectangleAndWeight)
{
    // Integral over [0,1]x[2,3] of (y - x) = 2 and of (y - x) * x * y.
    const auto plain = quad::integrate_abs_power({{0, 1}, {2, 3}}, 1.0, -1, nullptr, 1e-12);
    EXPECT_NEAR(plain.value, 2.0, 1e-12);
    const auto weighted =
        quad::integrate_abs_power({{0, 1}, {2, 3}}, 1.0, -1, [](double x, double y) { return x * y; }, 1e-12);
    // int x y^2 - x^2 y = (1/2)(19/3) - (1/3)(5/2)
    EXPECT_NEAR(weighted.value, 19.0 / 6.0 - 5.0 / 6.0, 1e-12);
}

TEST(Summation, CompensatedBeatsNaive)
{
    NeumaierSum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    EXPECT_EQ(s.value(), 1.0);
    EXPECT_EQ(sum_descending({1.0, 1e100, 1.0, -1e100}), 2.0);
}
