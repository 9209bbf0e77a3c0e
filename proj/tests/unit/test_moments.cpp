#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "momentlab/error.hpp"
#include "momentlab/moments.hpp"
#include "momentlab/sampling.hpp"

using namespace momentlab;

namespace {

constexpr double kP3 = 3.0 / 512.0;
constexpr double kQ3 = 509.0 / 512.0;
// Exact rationals for the r = 3 two-point law, rounded once.
constexpr double kEPlus3 = 2992.975440979004;
constexpr double kEMinus3 = 3199.404716491699;
constexpr double kDelta3 = -13528549.0 / 65536.0;

DiscreteJoint point_mass(double a)
{
    Eigen::MatrixXd w(1, 1);
    w << 1.0;
    const std::vector<double> atoms{a};
    return build_general_discrete(atoms, w);
}

DiscreteJoint counterexample3() { return to_discrete(build_counterexample(RExponent(3.0))); }

DiscreteJoint cauchy4()
{
    const std::vector<double> a{-1.5, 0.25, 1.0, 3.0}, c{0.5, 1.0, 2.0, 4.0}, d{1.0, 2.0, 0.5, 1.5};
    return build_cauchy_discrete(a, c, d, true);
}

std::vector<Model> golden_models()
{
    std::vector<Model> out;
    out.emplace_back(cauchy4());
    out.emplace_back(counterexample3());
    out.emplace_back(point_mass(0.75));
    const std::vector<double> a3{1, 2, 3}, c3{1, 2, 3}, d3{1, 1, 1};
    out.emplace_back(build_cauchy_discrete(a3, c3, d3, true));
    Eigen::MatrixXd w(3, 3);
    w << 0.2, 0.1, 0.0, 0.1, 0.2, 0.1, 0.0, 0.1, 0.2;
    const std::vector<double> g3{-2.0, 0.5, 1.5};
    out.emplace_back(build_general_discrete(g3, w));
    out.emplace_back(build_uniform_remark());
    out.emplace_back(build_product_density({{-1, 0, 0.25}, {1, 2, 0.75}}));
    out.emplace_back(build_mixture_density({{-2, 0.5, 0.3}, {1, 0.25, 0.7}}));
    out.emplace_back(build_cauchy_density(parse_expr("x"), parse_expr("1"), {{1.0, 2.0}}));
    out.emplace_back(build_smoothed(build_counterexample(RExponent(3.0)), 0.2));
    return out;
}

} // namespace

TEST(MomentDiscrete, PointMass)
{
    const auto m = point_mass(1.5);
    for (double r : {0.5, 1.0, 3.0}) {
        EXPECT_DOUBLE_EQ(moment_discrete(m, RExponent(r), Sign::Plus).value, std::pow(3.0, r));
        EXPECT_EQ(moment_discrete(m, RExponent(r), Sign::Minus).value, 0.0);
    }
    EXPECT_TRUE(std::isinf(moment_discrete(m, RExponent(-0.5), Sign::Minus).value));
}

TEST(MomentDiscrete, CounterexampleR3)
{
    const auto m = counterexample3();
    const auto plus = moment_discrete(m, RExponent(3.0), Sign::Plus);
    const auto minus = moment_discrete(m, RExponent(3.0), Sign::Minus);
    EXPECT_NEAR(plus.value, kEPlus3, 1e-12 * kEPlus3);
    EXPECT_NEAR(minus.value, kEMinus3, 1e-12 * kEMinus3);
    EXPECT_NEAR(plus.value,
                kP3 * kP3 * std::pow(128.0, 3) + kQ3 * kQ3 * 8.0 + 2 * kP3 * kQ3 * std::pow(63.0, 3), 1e-9);
    EXPECT_LE(plus.abs_error_bound, 1e-12 * plus.value);
    EXPECT_EQ(plus.method, Method::Exact);
}

TEST(MomentDiscrete, RZeroRejected) { EXPECT_THROW(RExponent(0.0), RegimeError); }

TEST(ExpectationXY, Examples)
{
    EXPECT_NEAR(expectation_xy(counterexample3()).value, 100489.0 / 262144.0, 1e-15);
    EXPECT_NEAR(expectation_xy(build_uniform_remark()).value, 2.25, 1e-12);
    const auto centered = build_product_density({{-1, 0, 0.5}, {0, 1, 0.5}});
    EXPECT_NEAR(expectation_xy(centered).value, 0.0, 1e-14);
}

TEST(DensityQuadrature, UniformRemark)
{
    const auto m = build_uniform_remark();
    EXPECT_NEAR(moment_density_quadrature(m, RExponent(1.0), Sign::Minus).value, 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(moment_density_quadrature(m, RExponent(-0.5), Sign::Minus).value, 8.0 / 3.0, 1e-8);
    EXPECT_NEAR(moment_density_quadrature(m, RExponent(1.0), Sign::Plus).value, 3.0, 1e-9);
    EXPECT_NEAR(moment_density_quadrature(m, RExponent(0.5), Sign::Plus).value, 1.7279839235340237, 1e-8);
    EXPECT_NEAR(moment_density_quadrature(m, RExponent(-0.9), Sign::Plus).value, 0.37819364415727044, 1e-8);
    EXPECT_TRUE(std::isinf(moment_density_quadrature(m, RExponent(-1.0), Sign::Minus).value));
    EXPECT_THROW(moment_density_quadrature(m, RExponent(1.0), Sign::Minus, 1e-13), InvalidArgument);
}

TEST(DensityQuadrature, SmoothedNearExact)
{
    const auto m = build_smoothed(build_counterexample(RExponent(3.0)), 0.1);
    const double plus = moment_density_quadrature(m, RExponent(3.0), Sign::Plus).value;
    const double minus = moment_density_quadrature(m, RExponent(3.0), Sign::Minus).value;
    EXPECT_NEAR(plus - minus, kDelta3, 5.0);
    EXPECT_NEAR(plus - minus, -206.39091168212891, 1e-6);
}

TEST(MonteCarlo, PointMassHasZeroWidth)
{
    const auto est = moment_monte_carlo(point_mass(1.25), RExponent(2.0), Sign::Plus, 1000, 3);
    EXPECT_EQ(est.value, 6.25);
    EXPECT_EQ(est.abs_error_bound, 0.0);
    EXPECT_EQ(est.seed, 3u);
    EXPECT_THROW(moment_monte_carlo(point_mass(1.25), RExponent(2.0), Sign::Plus, 999, 3), InvalidArgument);
}

TEST(MonteCarlo, CoversExactValues)
{
    const auto ce = moment_monte_carlo(counterexample3(), RExponent(3.0), Sign::Plus, 1'000'000, 17);
    EXPECT_LE(std::fabs(ce.value - kEPlus3), ce.abs_error_bound);
    const auto uni = moment_monte_carlo(build_uniform_remark(), RExponent(1.0), Sign::Minus, 1'000'000, 17);
    EXPECT_LE(std::fabs(uni.value - 1.0 / 3.0), uni.abs_error_bound);
    EXPECT_EQ(uni.method, Method::MonteCarlo);
    EXPECT_EQ(uni.n, 1'000'000);
}

TEST(MonteCarlo, BitReproducibleAcrossWorkers)
{
    const Model m = cauchy4();
    const auto one = moment_monte_carlo(m, RExponent(1.5), Sign::Minus, 300'000, 99, 1);
    const auto again = moment_monte_carlo(m, RExponent(1.5), Sign::Minus, 300'000, 99, 1);
    const auto three = moment_monte_carlo(m, RExponent(1.5), Sign::Minus, 300'000, 99, 3);
    EXPECT_EQ(one.value, again.value);
    EXPECT_EQ(one.value, three.value);
    EXPECT_EQ(one.abs_error_bound, three.abs_error_bound);
    const auto other = moment_monte_carlo(m, RExponent(1.5), Sign::Minus, 300'000, 100, 1);
    EXPECT_NE(one.value, other.value);
}

TEST(MonteCarlo, CauchyDensityRejectionSampler)
{
    const Model m = build_cauchy_density(parse_expr("x"), parse_expr("1"), {{1.0, 2.0}});
    const auto q = moment_density_quadrature(std::get<DensityModel>(m), RExponent(1.0), Sign::Plus);
    const auto mc = moment_monte_carlo(m, RExponent(1.0), Sign::Plus, 200'000, 5);
    EXPECT_LE(std::fabs(mc.value - q.value), mc.abs_error_bound + q.abs_error_bound);
}

TEST(AliasTable, Frequencies)
{
    const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
    AliasTable table(w);
    std::mt19937_64 rng(1);
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 200000; ++i)
        ++counts[table.sample(rng)];
    EXPECT_EQ(counts[1], 0);
    for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(counts[i] / 200000.0, w[i], 0.005);
}

TEST(Delta, QuadraticIdentityOnDiscreteModels)
{
    DeltaOptions opts;
    for (const Model& m : golden_models()) {
        const auto* d = std::get_if<DiscreteJoint>(&m);
        if (!d)
            continue;
        const double dl = delta(m, RExponent(2.0), opts).value;
        const double exy = expectation_xy(*d).value;
        const double scale = std::max(1.0, moment_discrete(*d, RExponent(2.0), Sign::Plus).value);
        EXPECT_NEAR(dl, 4.0 * exy, 1e-10 * scale);
    }
}

TEST(Delta, CounterexampleIsNegative)
{
    DeltaOptions opts;
    const auto d = delta(Model(counterexample3()), RExponent(3.0), opts);
    EXPECT_NEAR(d.value, kDelta3, 1e-12 * std::fabs(kDelta3));
    EXPECT_GE(delta(Model(counterexample3()), RExponent(1.0), opts).value, -1e-10);
    EXPECT_GE(delta(Model(cauchy4()), RExponent(1.0), opts).value, -1e-10);
}

TEST(Delta, ExactOnDensityRejected)
{
    DeltaOptions opts;
    EXPECT_THROW(delta(Model(build_uniform_remark()), RExponent(1.0), opts), InvalidArgument);
}

TEST(Moments, FinitenessBound)
{
    DeltaOptions opts;
    for (double r : {0.25, 0.5, 1.0, 1.5, 1.9}) {
        const RExponent re(r);
        for (const Model& m : golden_models()) {
            const auto* d = std::get_if<DiscreteJoint>(&m);
            if (!d)
                continue;
            double abs_r = 0.0;
            const auto marg = d->marginal();
            for (std::size_t i = 0; i < marg.size(); ++i)
                abs_r += marg[i] * std::pow(std::fabs(d->atoms()[i]), r);
            const double bound = re.triangle_constant() * 2.0 * abs_r;
            EXPECT_LE(moment_discrete(*d, re, Sign::Plus).value, bound * (1 + 1e-12));
            EXPECT_LE(moment_discrete(*d, re, Sign::Minus).value, bound * (1 + 1e-12));
        }
    }
}

TEST(Moments, TransposeSymmetry)
{
    const auto m = cauchy4();
    const DiscreteJoint t(m.atoms(), m.weights().transpose());
    for (double r : {0.5, 1.5, 3.0}) {
        EXPECT_EQ(moment_discrete(m, RExponent(r), Sign::Plus).value,
                  moment_discrete(t, RExponent(r), Sign::Plus).value);
        EXPECT_EQ(moment_discrete(m, RExponent(r), Sign::Minus).value,
                  moment_discrete(t, RExponent(r), Sign::Minus).value);
    }
    const auto dens = build_cauchy_density(parse_expr("1+x^2"), parse_expr("exp(-x)"), {{-1.0, 0.5}, {1.0, 2.0}});
    for (double x : {-0.9, -0.2, 1.3})
        for (double y : {-0.5, 0.4, 1.9})
            EXPECT_EQ(dens.density(x, y), dens.density(y, x));
}

TEST(Moments, MethodAgreementGoldenCorpus)
{
    const auto models = golden_models();
    ASSERT_EQ(models.size(), 10u);
    for (std::size_t idx = 0; idx < models.size(); ++idx) {
        const Model& m = models[idx];
        const bool discrete = std::holds_alternative<DiscreteJoint>(m);
        for (double r : {0.25, 0.5, 1.0, 1.5, 2.0}) {
            const RExponent re(r);
            DeltaOptions primary;
            primary.method = discrete ? Method::Exact : Method::Quadrature;
            DeltaOptions quad;
            quad.method = Method::Quadrature;
            DeltaOptions mc;
            mc.method = Method::MonteCarlo;
            mc.mc_samples = 1'000'000;
            mc.seed = 2024;
            const auto p = moment_pair(m, re, primary);
            const auto q = moment_pair(m, re, quad);
            const auto s = moment_pair(m, re, mc);
            for (auto pick : {&MomentPair::plus, &MomentPair::minus}) {
                const auto& a = p.*pick;
                const auto& b = q.*pick;
                const auto& c = s.*pick;
                EXPECT_LE(std::fabs(a.value - b.value), a.abs_error_bound + b.abs_error_bound + 1e-12)
                    << "model " << idx << " r=" << r << " quadrature";
                EXPECT_LE(std::fabs(a.value - c.value), a.abs_error_bound + c.abs_error_bound + 1e-12)
                    << "model " << idx << " r=" << r << " monte carlo";
            }
        }
    }
}
