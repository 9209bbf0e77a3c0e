#include "momentlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "momentlab/error.hpp"

namespace momentlab::quad {

namespace {

// Kronrod abscissae (positive half) with Kronrod and Gauss weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

} // namespace

double gauss_kronrod_panel(const Fn1& f, double a, double b, double& error)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1)
            gauss += kWg[j / 2] * sum;
    }
    error = std::fabs((kronrod - gauss) * half);
    return kronrod * half;
}

QuadResult gauss_kronrod(const Fn1& f, double a, double b, double rel_tol, double abs_tol, std::size_t max_panels)
{
    QuadResult out;
    if (a == b)
        return out;

    std::vector<Panel> heap;
    double err = 0.0;
    const double v = gauss_kronrod_panel(f, a, b, err);
    heap.push_back({a, b, v, err});
    out.evaluations = 15;
    double total = v;
    double total_err = err;

    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (heap.size() >= max_panels)
            throw ToleranceNotMet("Gauss-Kronrod panel limit reached", total_err);
        std::pop_heap(heap.begin(), heap.end());
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw ToleranceNotMet("Gauss-Kronrod panel below resolution", total_err);
        double e1 = 0.0, e2 = 0.0;
        const double v1 = gauss_kronrod_panel(f, worst.a, mid, e1);
        const double v2 = gauss_kronrod_panel(f, mid, worst.b, e2);
        out.evaluations += 30;
        heap.push_back({worst.a, mid, v1, e1});
        std::push_heap(heap.begin(), heap.end());
        heap.push_back({mid, worst.b, v2, e2});
        std::push_heap(heap.begin(), heap.end());
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
    }

    // Final sum in left-to-right panel order so the result does not depend
    // on the refinement history.
    std::sort(heap.begin(), heap.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    out.value = 0.0;
    out.abs_error = 0.0;
    for (const Panel& p : heap) {
        out.value += p.value;
        out.abs_error += p.error;
    }
    out.panels = heap.size();
    return out;
}

QuadResult tanh_sinh(const Fn1& f, double a, double b, double rel_tol, double abs_tol, int max_level)
{
    QuadResult out;
    if (a == b)
        return out;
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    constexpr double kTmax = 6.0;
    constexpr int kMinLevel = 3;
    const double width = b - a;

    // Contribution of the symmetric node pair at t > 0 (or the centre node).
    auto pair_sum = [&](double t) {
        const double u = kHalfPi * std::sinh(t);
        const double e = std::exp(-2.0 * u);
        const double offset = width * e / (1.0 + e);
        if (offset == 0.0)
            return 0.0;
        const double w = width * kHalfPi * std::cosh(t) * 2.0 * e / ((1.0 + e) * (1.0 + e));
        out.evaluations += 2;
        return w * (f(a + offset) + f(b - offset));
    };

    double h = 1.0;
    double sum = 0.5 * width * kHalfPi * f(0.5 * (a + b));
    out.evaluations = 1;
    for (double t = h; t <= kTmax; t += h)
        sum += pair_sum(t);
    double estimate = h * sum;
    double error = std::numeric_limits<double>::infinity();

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double added = 0.0;
        for (double t = h; t <= kTmax; t += 2.0 * h)
            added += pair_sum(t);
        sum += added;
        const double next = h * sum;
        error = std::fabs(next - estimate);
        estimate = next;
        if (!std::isfinite(estimate))
            throw ToleranceNotMet("tanh-sinh produced a non-finite value", error);
        if (level >= kMinLevel && error <= std::max(abs_tol, rel_tol * std::fabs(estimate))) {
            out.value = estimate;
            out.abs_error = error;
            out.panels = 1;
            return out;
        }
    }
    throw ToleranceNotMet("tanh-sinh did not converge", error);
}

namespace {

// Integral over v in [delta, delta + length] of v^r g(v), g smooth.
double power_segment(double r, double delta, double length, const Fn1& g, double rel_tol, double& err,
                     std::size_t& evals)
{
    QuadResult res;
    if (delta == 0.0) {
        res = tanh_sinh([&](double v) { return std::pow(v, r) * g(v); }, 0.0, length, rel_tol, 0.0, 10);
    } else if (delta >= length) {
        res = tanh_sinh([&](double v) { return std::pow(v, r) * g(v); }, delta, delta + length, rel_tol, 0.0, 10);
    } else {
        // v = e^s flattens the near-singularity at v = 0 just outside the range.
        res = tanh_sinh(
            [&](double s) {
                const double v = std::exp(s);
                return std::exp(s * (r + 1.0)) * g(v);
            },
            std::log(delta), std::log(delta + length), rel_tol, 0.0, 10);
    }
    err += res.abs_error;
    evals += res.evaluations;
    return res.value;
}

} // namespace

QuadResult integrate_abs_power(const Rect& rect, double r, int sign, const Fn2& weight, double rel_tol)
{
    const double s = sign >= 0 ? 1.0 : -1.0;
    const double ylo = rect.y.lo;
    const double yhi = rect.y.hi;
    const double inner_tol = std::max(0.05 * rel_tol, 1e-15);
    QuadResult out;

    auto w = [&](double x, double y) { return weight ? weight(x, y) : 1.0; };

    // |x + s y| = |y - k| with k = -s x.
    auto inner = [&](double x) {
        const double k = -s * x;
        double err = 0.0;
        std::size_t evals = 0;
        double total = 0.0;
        if (k > ylo && k < yhi) {
            total += power_segment(r, 0.0, k - ylo, [&](double v) { return w(x, k - v); }, inner_tol, err, evals);
            total += power_segment(r, 0.0, yhi - k, [&](double v) { return w(x, k + v); }, inner_tol, err, evals);
        } else if (k <= ylo) {
            total = power_segment(r, ylo - k, yhi - ylo, [&](double v) { return w(x, k + v); }, inner_tol, err,
                                  evals);
        } else {
            total = power_segment(r, k - yhi, yhi - ylo, [&](double v) { return w(x, k - v); }, inner_tol, err,
                                  evals);
        }
        out.evaluations += evals;
        return total;
    };

    std::vector<double> cuts{rect.x.lo, rect.x.hi};
    for (double y : {ylo, yhi}) {
        const double x = -s * y;
        if (x > rect.x.lo && x < rect.x.hi)
            cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const QuadResult seg = tanh_sinh(inner, cuts[i], cuts[i + 1], rel_tol, 0.0);
        out.value += seg.value;
        out.abs_error += seg.abs_error;
        out.panels += 1;
    }
    out.abs_error += inner_tol * std::fabs(out.value);
    return out;
}

QuadResult integrate_rect(const Rect& rect, const Fn2& f, double rel_tol)
{
    const double inner_tol = std::max(0.05 * rel_tol, 1e-15);
    QuadResult out;
    auto inner = [&](double x) {
        const QuadResult r = tanh_sinh([&](double y) { return f(x, y); }, rect.y.lo, rect.y.hi, inner_tol, 0.0, 10);
        out.evaluations += r.evaluations;
        return r.value;
    };
    const QuadResult outer = tanh_sinh(inner, rect.x.lo, rect.x.hi, rel_tol, 0.0);
    out.value = outer.value;
    out.abs_error = outer.abs_error + inner_tol * std::fabs(outer.value);
    out.panels = 1;
    return out;
}

} // namespace momentlab::quad
