#include "momentlab/representation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "momentlab/error.hpp"
#include "momentlab/moments.hpp"
#include "momentlab/positivity.hpp"
#include "momentlab/quadrature.hpp"
#include "momentlab/summation.hpp"

namespace momentlab {

namespace {

constexpr double kMaxOscillations = 1e6;
constexpr double kPanelWidth = std::numbers::pi / 4.0;

void require_representable(const RExponent& r)
{
    if (!(r.value() >= kRepresentationMinR && r.value() < 2.0))
        throw RegimeError("the integral representation is used for 0.05 <= r < 2, got r = " +
                          std::to_string(r.value()));
}

// (1 - cos u) computed without cancellation for small u.
double one_minus_cos(double u)
{
    const double s = std::sin(0.5 * u);
    return 2.0 * s * s;
}

// 1 - cos u - u^2/2
double cos_remainder(double u)
{
    if (std::fabs(u) < 0.5) {
        const double u2 = u * u;
        double term = -u2 * u2 / 24.0;
        double sum = 0.0;
        for (int k = 2; k < 12 && term != 0.0; ++k) {
            sum += term;
            term *= -u2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        }
        return sum;
    }
    return one_minus_cos(u) - 0.5 * u * u;
}

// Integral of g over [a, b] by adaptive Gauss-Kronrod on consecutive panels
// no wider than `width`, summed left to right. Each panel may stop at an
// absolute error of abs_density times its length.
double paneled_integral(const quad::Fn1& g, double a, double b, double width, double rel_tol, double abs_density)
{
    const auto panels = static_cast<std::int64_t>(std::ceil((b - a) / width));
    NeumaierSum sum;
    for (std::int64_t k = 0; k < panels; ++k) {
        const double lo = a + (b - a) * static_cast<double>(k) / static_cast<double>(panels);
        const double hi = k + 1 == panels ? b : a + (b - a) * static_cast<double>(k + 1) / static_cast<double>(panels);
        sum.add(quad::gauss_kronrod(g, lo, hi, rel_tol, abs_density * (hi - lo)).value);
    }
    return sum.value();
}

// Integral of cos(u) u^(-s) over [U, inf) for U a multiple of 2 pi, by the
// asymptotic expansion from repeated integration by parts:
// U^(-s) [ s/U - (s)_3/U^3 + (s)_5/U^5 - ... ].
double cosine_tail(double s, double big_u, double& bound)
{
    double term = s / big_u; // (s)_1 / U
    double sum = 0.0;
    double sign = 1.0;
    double k = 1.0;
    for (int i = 0; i < 6; ++i) {
        sum += sign * term;
        term *= (s + k) * (s + k + 1.0) / (big_u * big_u);
        k += 2.0;
        sign = -sign;
    }
    bound = std::fabs(term) * std::pow(big_u, -s);
    return sum * std::pow(big_u, -s);
}

} // namespace

TruncationWindow::TruncationWindow(double t_low, double t_high) : t_low_(t_low), t_high_(t_high)
{
    if (!(t_low > 0.0) || !(t_low < t_high) || !std::isfinite(t_high))
        throw InvalidArgument("truncation window needs 0 < t_low < t_high < inf");
}

TruncationWindow TruncationWindow::from_n(std::int64_t n)
{
    if (n < 2)
        throw InvalidArgument("truncation index n must be at least 2, got " + std::to_string(n));
    const double nd = static_cast<double>(n);
    return TruncationWindow(1.0 / nd, nd);
}

double cr_constant(const RExponent& r)
{
    if (!(r.value() > 0.0 && r.value() < 2.0))
        throw RegimeError("C_r is defined for 0 < r < 2, got r = " + std::to_string(r.value()));
    return std::exp(std::lgamma(r.value() + 1.0)) * std::sin(std::numbers::pi * r.value() / 2.0) / std::numbers::pi;
}

ReciprocalCheck cr_reciprocal_check_detail(const RExponent& r, double rel_tol)
{
    require_representable(r);
    const double rv = r.value();
    const double s = rv + 1.0;
    const double tolerance = rv > 1.8 ? std::max(rel_tol, 1e-6) : rel_tol;

    // (0, 1]: integrand ~ u^(1-r)/2, an integrable endpoint singularity for r > 1.
    // Split off u^(1-r)/2, which integrates to 1/(2(2-r)).
    const auto rest = quad::tanh_sinh([&](double u) {
            return u < 1e-4 ? -std::pow(u, 3.0 - rv) / 24.0 : cos_remainder(u) / std::pow(u, s);
        }, 0.0, 1.0, 1e-14,
                                      1e-16);
    const double head = 0.5 / (2.0 - rv) + rest.value;
    // [1, inf): (1 - cos u) u^-s = u^-s - cos(u) u^-s; the first part is 1/r.
    constexpr int kPeriods = 200;
    const double big_u = 2.0 * std::numbers::pi * kPeriods;
    const double body = paneled_integral([&](double u) { return std::cos(u) / std::pow(u, s); }, 1.0, big_u,
                                         kPanelWidth, 1e-13, 1e-17);
    double tail_bound = 0.0;
    const double tail = cosine_tail(s, big_u, tail_bound);
    const double half = head + 1.0 / rv - (body + tail);

    ReciprocalCheck out;
    out.integral = 2.0 * half;
    out.product = cr_constant(r) * out.integral;
    out.tolerance = tolerance;
    if (!(std::fabs(out.product - 1.0) <= tolerance))
        throw ToleranceNotMet("C_r times its defining integral differs from 1", std::fabs(out.product - 1.0));
    return out;
}

double cr_reciprocal_check(const RExponent& r, double rel_tol) { return cr_reciprocal_check_detail(r, rel_tol).product; }

double phi_n(double z, const RExponent& r, const TruncationWindow& window)
{
    require_representable(r);
    const double az = std::fabs(z);
    if (az == 0.0)
        return 0.0;
    if (window.t_high() * az > kMaxOscillations)
        throw ToleranceNotMet("t_high |z| = " + std::to_string(window.t_high() * az) +
                                  " exceeds the supported oscillation count",
                              std::numeric_limits<double>::infinity());
    const double rv = r.value();
    const double s = rv + 1.0;
    // Substituting u = t |z| gives |z|^r times an integral over (|z| t_low, |z| t_high)
    // with panels of a quarter period.
    const double integral = paneled_integral([&](double u) { return one_minus_cos(u) / std::pow(u, s); },
                                             az * window.t_low(), az * window.t_high(), kPanelWidth, 1e-12, 1e-17);
    const double value = 2.0 * cr_constant(r) * std::pow(az, rv) * integral;
    const double ceiling = std::pow(az, rv);
    if (value < 0.0 || value > ceiling * (1.0 + 1e-9))
        throw InvariantViolation("Phi_n(" + std::to_string(z) + ") = " + std::to_string(value) +
                                 " left [0, |z|^r]");
    return value;
}

TruncatedDelta truncated_delta_channels(const DiscreteJoint& model, const RExponent& r,
                                        const TruncationWindow& window, double rel_tol)
{
    require_representable(r);
    if (!model.is_finite())
        throw InvalidArgument("truncated_delta needs a finite discrete model");
    const double rv = r.value();
    const auto& a = model.atoms();
    const auto& p = model.weights();

    double max_atom = 0.0;
    for (double v : a)
        max_atom = std::max(max_atom, std::fabs(v));

    TruncatedDelta out;
    if (max_atom == 0.0) {
        out.integral_channel = 0.0;
        out.expectation_channel = 0.0;
        out.tolerance = 0.0;
        return out;
    }
    if (window.t_high() * 2.0 * max_atom > kMaxOscillations)
        throw ToleranceNotMet("window too wide for the atoms", std::numeric_limits<double>::infinity());

    // Q(t) oscillates at frequencies up to 2 max|a|.
    const double width = kPanelWidth / (2.0 * max_atom);
    const double integral = paneled_integral(
        [&](double t) { return sin_quadratic_form(model, t) / std::pow(t, rv + 1.0); }, window.t_low(),
        window.t_high(), width, 1e-12, 1e-16);
    out.integral_channel = 4.0 * cr_constant(r) * integral;

    std::map<double, double> cache;
    auto phi = [&](double z) {
        const double key = std::fabs(z);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, phi_n(key, r, window)).first;
        return it->second;
    };
    NeumaierSum expectation;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (p(i, j) != 0.0)
                expectation.add(p(i, j) * (phi(a[i] + a[j]) - phi(a[i] - a[j])));
    out.expectation_channel = expectation.value();

    const double scale = moment_discrete(model, r, Sign::Plus).value + moment_discrete(model, r, Sign::Minus).value;
    out.tolerance = rel_tol * scale;
    if (std::fabs(out.integral_channel - out.expectation_channel) > out.tolerance)
        throw ChannelMismatch("t-integral channel " + std::to_string(out.integral_channel) +
                              " vs expectation channel " + std::to_string(out.expectation_channel));
    return out;
}

double truncated_delta(const DiscreteJoint& model, const RExponent& r, const TruncationWindow& window,
                       double rel_tol)
{
    return truncated_delta_channels(model, r, window, rel_tol).integral_channel;
}

} // namespace momentlab
