#pragma once

#include <cstddef>
#include <functional>

#include "momentlab/model.hpp"

namespace momentlab::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    std::size_t panels = 0;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Globally adaptive Gauss-Kronrod (7/15) with bisection of the worst panel.
// Throws ToleranceNotMet once max_panels is exhausted.
QuadResult gauss_kronrod(const Fn1& f, double a, double b, double rel_tol, double abs_tol,
                         std::size_t max_panels = 4000);

// Single G7K15 panel; `error` receives |K15 - G7|.
double gauss_kronrod_panel(const Fn1& f, double a, double b, double& error);

// Double-exponential (tanh-sinh) rule with level halving. Nodes are placed by
// their offset from the nearest endpoint, so integrable algebraic endpoint
// singularities are resolved down to offsets of ~1e-270 (b - a).
QuadResult tanh_sinh(const Fn1& f, double a, double b, double rel_tol, double abs_tol, int max_level = 12);

struct Rect {
    Interval x;
    Interval y;
};

// Integral over `rect` of |x + sign*y|^r * weight(x, y). A null weight means
// 1. The outer and inner integrals are split where the kink line
// x + sign*y = 0 meets the rectangle, so no panel straddles it.
QuadResult integrate_abs_power(const Rect& rect, double r, int sign, const Fn2& weight, double rel_tol);

// Integral over `rect` of a function smooth on the closed rectangle.
QuadResult integrate_rect(const Rect& rect, const Fn2& f, double rel_tol);

} // namespace momentlab::quad
