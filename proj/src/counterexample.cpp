#include "momentlab/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "momentlab/error.hpp"
#include "momentlab/quadrature.hpp"
#include "momentlab/summation.hpp"

namespace momentlab {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::string to_text(const cpp_rational& q)
{
    return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const cpp_rational& q) { return q.convert_to<double>(); }

cpp_rational ipow(const cpp_rational& base, int e)
{
    cpp_rational out = 1;
    for (int i = 0; i < e; ++i)
        out *= base;
    return out;
}

// Sum over odd k >= 3 of C(r, k) x^k; (1+x)^r - (1-x)^r = 2 (r x + this).
double odd_binomial_tail(double r, double x)
{
    double coeff = r * (r - 1.0) * (r - 2.0) / 6.0; // C(r, 3)
    double power = x * x * x;
    double sum = 0.0;
    for (int k = 3; k < 2000; k += 2) {
        const double term = coeff * power;
        sum += term;
        if (term == 0.0 || (std::fabs(term) < 1e-18 * std::fabs(sum) && k > r))
            break;
        coeff *= (r - k) * (r - k - 1.0) / ((k + 1.0) * (k + 2.0));
        power *= x * x;
    }
    return sum;
}

std::optional<RationalBreakdown> rational_breakdown(double r)
{
    if (r != std::floor(r))
        return std::nullopt;
    const int ri = static_cast<int>(r);
    if ((2 * ri) % (ri - 2) != 0)
        return std::nullopt;
    const int k = 2 * ri / (ri - 2);

    const cpp_rational two = 2;
    const cpp_rational big_a = ipow(two, k);
    const cpp_rational p = cpp_rational(ri) / (ipow(two, ri) * big_a);
    const cpp_rational q = 1 - p;
    const cpp_rational e_plus = p * p * ipow(2 * big_a, ri) + q * q * ipow(two, ri) + 2 * p * q * ipow(big_a - 1, ri);
    const cpp_rational e_minus = 2 * p * q * ipow(big_a + 1, ri);
    const cpp_rational delta = e_plus - e_minus;
    const cpp_rational lhs = ipow(big_a + 1, ri) - ipow(big_a - 1, ri);
    const cpp_rational rhs = 2 * ri * ipow(big_a, ri - 1);
    const cpp_rational substituted =
        ipow(two, ri) * p * p * ipow(big_a, ri) + ipow(two, ri) * q * q - 4 * ri * p * q * ipow(big_a, ri - 1);
    const cpp_rational chain = ipow(two, ri) * (1 - ri * ri);

    if (!(lhs >= rhs && delta <= substituted && substituted < chain && chain < 0))
        throw InvariantViolation("exact inequality chain fails at r = " + std::to_string(ri));

    RationalBreakdown out;
    out.e_plus = to_text(e_plus);
    out.e_minus = to_text(e_minus);
    out.delta = to_text(delta);
    out.jensen_lhs = to_text(lhs);
    out.jensen_rhs = to_text(rhs);
    out.chain_bound = to_text(chain);
    out.values = {to_double(e_plus), to_double(e_minus), to_double(delta), to_double(lhs), to_double(rhs),
                  to_double(lhs - rhs), to_double(substituted), to_double(chain)};
    return out;
}

BreakdownValues floating_breakdown(const TwoPointLaw& law)
{
    const double r = law.r;
    const double a = law.high_atom;
    const double p = law.p;
    const double q = law.q;
    const double a_r = std::pow(a, r);

    BreakdownValues v;
    v.jensen_rhs = 2.0 * r * std::pow(a, r - 1.0);
    v.jensen_gap = 2.0 * a_r * odd_binomial_tail(r, 1.0 / a);
    v.jensen_lhs = v.jensen_rhs + v.jensen_gap;

    const double t_high = std::exp(2.0 * std::log(p) + r * std::log(2.0 * a)); // p^2 (2A)^r
    const double t_low = q * q * std::exp2(r);                                  // q^2 2^r
    const double t_minus = 2.0 * p * q * std::pow(a - 1.0, r);
    v.e_plus = sum_descending({t_high, t_low, t_minus});
    v.e_minus = 2.0 * p * q * std::pow(a + 1.0, r);
    v.delta = sum_descending({t_high, t_low, -2.0 * p * q * v.jensen_rhs, -2.0 * p * q * v.jensen_gap});
    v.jensen_substituted = sum_descending({std::exp2(r) * p * p * a_r, std::exp2(r) * q * q,
                                           -4.0 * r * p * q * std::pow(a, r - 1.0)});
    v.chain_bound = std::exp2(r) * (1.0 - r * r);
    return v;
}

} // namespace

DeltaBreakdown delta_exact(const TwoPointLaw& law)
{
    if (!(law.r > 2.0))
        throw RegimeError("delta_exact needs a law built for r > 2, got r = " + std::to_string(law.r));
    DeltaBreakdown out;
    out.r = law.r;
    out.floating = floating_breakdown(law);
    out.rational = rational_breakdown(law.r);
    out.exact = out.rational.has_value();
    out.values = out.exact ? out.rational->values : out.floating;

    const BreakdownValues& v = out.floating;
    const double slack = 1e-12 * std::max({1.0, v.e_plus, v.e_minus});
    if (!(v.jensen_gap >= 0.0 && v.delta <= v.jensen_substituted + slack && v.jensen_substituted < v.chain_bound &&
          v.chain_bound < 0.0))
        throw InvariantViolation("floating-point inequality chain fails at r = " + std::to_string(law.r));
    return out;
}

MomentEstimate smoothed_delta(const RExponent& r, double epsilon, double rel_tol)
{
    const TwoPointLaw law = build_counterexample(r);
    const DensityModel model = build_smoothed(law, epsilon);
    const MomentEstimate plus = moment_density_quadrature(model, r, Sign::Plus, rel_tol);
    const MomentEstimate minus = moment_density_quadrature(model, r, Sign::Minus, rel_tol);
    MomentEstimate out;
    out.value = plus.value - minus.value;
    out.abs_error_bound = plus.abs_error_bound + minus.abs_error_bound;
    out.method = Method::Quadrature;
    out.n = plus.n + minus.n;
    return out;
}

RemarkBreakdown remark_negative_r(const RExponent& r)
{
    if (r.regime() != Regime::Negative)
        throw RegimeError("the remark concerns r < 0, got r = " + std::to_string(r.value()));
    const double rv = r.value();
    RemarkBreakdown out;
    out.r = rv;
    out.e_plus_bound = std::exp2(rv);

    // X + Y has the triangular density w - 2 on [2, 3] and 4 - w on [3, 4].
    auto rise = quad::gauss_kronrod([&](double w) { return std::pow(w, rv) * (w - 2.0); }, 2.0, 3.0, 1e-14, 0.0);
    auto fall = quad::gauss_kronrod([&](double w) { return std::pow(w, rv) * (4.0 - w); }, 3.0, 4.0, 1e-14, 0.0);
    out.e_plus = rise.value + fall.value;

    if (rv <= -1.0) {
        out.e_minus = std::numeric_limits<double>::infinity();
        out.e_minus_infinite = true;
        out.delta = -std::numeric_limits<double>::infinity();
    } else {
        out.e_minus = 2.0 / ((rv + 1.0) * (rv + 2.0));
        out.e_minus_quadrature = moment_density_quadrature(build_uniform_remark(), r, Sign::Minus, 1e-10).value;
        out.delta = out.e_plus - out.e_minus;
    }
    if (!(out.e_plus <= out.e_plus_bound && out.e_plus_bound < 1.0 && 1.0 < out.e_minus))
        throw InvariantViolation("E|X+Y|^r <= 2^r < 1 < E|X-Y|^r fails at r = " + std::to_string(rv));
    out.fails = out.delta < 0.0;
    return out;
}

double two_point_delta(double r, double a, double b, double p, double* e_plus)
{
    const double q = 1.0 - p;
    const double pp = p * p * std::pow(std::fabs(2.0 * a), r);
    const double qq = q * q * std::pow(std::fabs(2.0 * b), r);
    const double cross_plus = 2.0 * p * q * std::pow(std::fabs(a + b), r);
    const double cross_minus = 2.0 * p * q * std::pow(std::fabs(a - b), r);
    if (e_plus)
        *e_plus = pp + qq + cross_plus;
    return sum_descending({pp, qq, cross_plus, -cross_minus});
}

std::vector<TwoPointCandidate> search_two_point(const RExponent& r, std::span<const double> a_grid,
                                                std::span<const double> p_grid)
{
    if (a_grid.empty() || p_grid.empty())
        throw InvalidArgument("search grids must be non-empty");
    std::vector<TwoPointCandidate> hits;
    for (double a : a_grid) {
        if (a == -1.0 || !std::isfinite(a))
            continue;
        for (double p : p_grid) {
            if (!(p > 0.0 && p < 1.0))
                continue;
            double e_plus = 0.0;
            const double d = two_point_delta(r.value(), a, -1.0, p, &e_plus);
            if (d < -1e-12 * std::max(1.0, e_plus))
                hits.push_back({a, p, d});
        }
    }
    std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) {
        if (x.delta != y.delta)
            return x.delta < y.delta;
        if (x.a != y.a)
            return x.a < y.a;
        return x.p < y.p;
    });
    return hits;
}

} // namespace momentlab
