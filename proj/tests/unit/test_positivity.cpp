#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "momentlab/error.hpp"
#include "momentlab/positivity.hpp"

using namespace momentlab;

namespace {

DiscreteJoint random_cauchy(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    std::vector<double> a, c, d;
    for (int i = 0; i < n; ++i) {
        a.push_back(i + 0.5 * u(rng) / 10.0);
        c.push_back(u(rng));
        d.push_back(u(rng));
    }
    return build_cauchy_discrete(a, c, d, true);
}

} // namespace

TEST(CheckPsd, RankOneCounterexample)
{
    const auto m = to_discrete(build_counterexample(RExponent(3.0)));
    const auto rep = check_psd_discrete(m);
    EXPECT_EQ(rep.verdict, Verdict::Certified);
    EXPECT_NEAR(rep.min_value, 0.0, 1e-15);
    EXPECT_FALSE(rep.witness.has_value());
}

TEST(CheckPsd, CauchyMatrixCertified)
{
    const std::vector<double> a{1, 2, 3}, c{1, 2, 3}, d{1, 1, 1};
    const auto rep = check_psd_discrete(build_cauchy_discrete(a, c, d, true));
    EXPECT_EQ(rep.verdict, Verdict::Certified);
    EXPECT_GT(rep.min_value, 0.0);
}

TEST(CheckPsd, AntiDiagonalFalsified)
{
    Eigen::MatrixXd w(2, 2);
    w << 0, 0.5, 0.5, 0;
    const std::vector<double> atoms{0.0, 1.0};
    const auto rep = check_psd_discrete(build_general_discrete(atoms, w));
    EXPECT_EQ(rep.verdict, Verdict::Falsified);
    EXPECT_NEAR(rep.min_value, -0.5, 1e-15);
    ASSERT_TRUE(rep.witness.has_value());
    ASSERT_EQ(rep.witness->size(), 2u);
    EXPECT_NEAR(std::fabs((*rep.witness)[0]), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR((*rep.witness)[0], -(*rep.witness)[1], 1e-15);
}

TEST(CheckPsd, TruncatedModelIsFlagged)
{
    const auto m = truncate_countable(parse_expr("i", 'i'), parse_expr("1", 'i'),
                                      parse_expr("sqrt(2)*2^(-i)", 'i'), 12);
    const auto rep = check_psd_discrete(m);
    EXPECT_TRUE(rep.truncated);
    EXPECT_EQ(rep.verdict, Verdict::NotFalsified);
}

TEST(CheckPsd, RandomCauchyModelsCertified)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_cauchy(rng, 1 + static_cast<int>(rng() % 8));
        EXPECT_EQ(check_psd_discrete(m).verdict, Verdict::Certified);
    }
}

TEST(CheckPsd, ScaleInvariantVerdict)
{
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd w(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                w(i, j) = w(j, i) = u(rng);
        w /= w.sum();
        std::vector<double> atoms;
        for (int i = 0; i < n; ++i)
            atoms.push_back(i);
        const auto base = check_psd_discrete(DiscreteJoint(atoms, w));
        for (double lambda : {1e-8, 1e-3, 7.0}) {
            // Constructed directly: the scaled matrix is not a PMF.
            const Eigen::MatrixXd scaled = lambda * w;
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
            const bool certified = es.eigenvalues().minCoeff() >= -1e-10 * scaled.cwiseAbs().rowwise().sum().maxCoeff();
            EXPECT_EQ(certified, base.verdict == Verdict::Certified);
        }
    }
}

TEST(SinQuadraticForm, Examples)
{
    const auto ce = to_discrete(build_counterexample(RExponent(3.0)));
    EXPECT_EQ(sin_quadratic_form(ce, 0.0), 0.0);
    const double p = 3.0 / 512.0, q = 509.0 / 512.0;
    const double s = p * std::sin(64.0) + q * std::sin(-1.0);
    EXPECT_NEAR(sin_quadratic_form(ce, 1.0), s * s, 1e-15);

    Eigen::MatrixXd w(3, 3);
    const Eigen::Vector3d m(0.2, 0.5, 0.3);
    w = m * m.transpose();
    const std::vector<double> atoms{-1.0, 0.5, 2.0};
    const DiscreteJoint prod(atoms, w);
    for (double t : {0.3, 1.7, -4.0}) {
        double lin = 0.0;
        for (int i = 0; i < 3; ++i)
            lin += m[i] * std::sin(t * atoms[i]);
        EXPECT_NEAR(sin_quadratic_form(prod, t), lin * lin, 1e-15);
    }
}

TEST(SinQuadraticForm, NonNegativeForCertifiedModels)
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> tdist(-100.0, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_cauchy(rng, 1 + static_cast<int>(rng() % 8));
        ASSERT_EQ(check_psd_discrete(m).verdict, Verdict::Certified);
        for (int k = 0; k < 1000; ++k)
            ASSERT_GE(sin_quadratic_form(m, tdist(rng)), -1e-12);
    }
}

TEST(CauchyWitness, Examples)
{
    const std::vector<double> eta{1, -1}, c11{1, 1}, c12{1, 2}, zero{0, 0};
    EXPECT_NEAR(cauchy_positivity_witness(c11, eta), 0.0, 1e-16);
    EXPECT_NEAR(cauchy_positivity_witness(c12, eta), 1.0 / 12.0, 1e-16);
    EXPECT_EQ(cauchy_positivity_witness(c12, zero), 0.0);
    const std::vector<double> bad{1, -2};
    EXPECT_THROW(cauchy_positivity_witness(bad, eta), NonPositiveParameter);
}

TEST(CauchyWitness, RandomNonNegative)
{
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> cd(1e-9, 10.0);
    std::uniform_real_distribution<double> ed(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        std::vector<double> c, eta;
        for (int i = 0; i < n; ++i) {
            c.push_back(cd(rng));
            eta.push_back(ed(rng));
        }
        ASSERT_GE(cauchy_positivity_witness(c, eta), -1e-12);
    }
}

TEST(ProbeDensity, ProductKernelCertified)
{
    const auto m = build_smoothed(build_counterexample(RExponent(3.0)), 0.1);
    const std::vector<Expr> probes{parse_expr("x"), parse_expr("1-x^2"), parse_expr("abs(x)-3")};
    const auto rep = probe_density_positivity(m, probes);
    EXPECT_EQ(rep.verdict, Verdict::Certified);
    EXPECT_GE(rep.min_value, -1e-12);
    for (const auto& pr : probes) {
        const double h = density_quadratic_form(m, pr);
        EXPECT_GE(h, -1e-12);
    }
}

TEST(ProbeDensity, CauchyDensitySignProbe)
{
    const auto m = build_cauchy_density(parse_expr("x"), parse_expr("1"), {{1.0, 2.0}});
    const StepProbe sign{{1.5}, {-1.0, 1.0}};
    const double value = density_quadratic_form(m, Probe(sign));
    EXPECT_GE(value, 0.0);
    const std::vector<Probe> probes{Probe(sign), Probe(parse_expr("x-1.4"))};
    const auto rep = probe_density_positivity(m, probes);
    EXPECT_EQ(rep.verdict, Verdict::NotFalsified);
    EXPECT_TRUE(rep.seed.has_value());
}

TEST(ProbeDensity, ZeroProbeIsZero)
{
    const auto m = build_cauchy_density(parse_expr("x"), parse_expr("1"), {{1.0, 2.0}});
    EXPECT_EQ(density_quadratic_form(m, Probe(parse_expr("0"))), 0.0);
}

TEST(ProbeDensity, UnboundedProbeRejected)
{
    const auto m = build_cauchy_density(parse_expr("x"), parse_expr("1"), {{1.0, 2.0}});
    const std::vector<Expr> huge{parse_expr("1e9*x")};
    EXPECT_THROW(probe_density_positivity(m, huge), UnboundedProbe);
    const std::vector<Expr> pole{parse_expr("1/(x-1)")};
    EXPECT_THROW(probe_density_positivity(m, pole), UnboundedProbe);
}

TEST(ProbeDensity, GridTooSmall)
{
    const auto m = build_uniform_remark();
    EXPECT_THROW(probe_density_positivity(m, std::span<const Expr>{}, 10), InvalidArgument);
}
