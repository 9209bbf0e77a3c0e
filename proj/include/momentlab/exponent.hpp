#pragma once

#include <string_view>

namespace momentlab {

enum class Regime {
    Subadditive, // (0, 1]
    Convex,      // (1, 2)
    Quadratic,   // {2}
    Failure,     // (2, inf)
    Negative,    // (-inf, 0)
};

std::string_view to_string(Regime regime);

// Moment exponent r tagged with the regime that contains it. r = 0 and
// non-finite values are rejected with RegimeError.
class RExponent {
public:
    explicit RExponent(double value);

    double value() const noexcept { return value_; }
    Regime regime() const noexcept { return regime_; }

    // Constant in |x +- y|^r <= A_r (|x|^r + |y|^r); defined for 0 < r < 2.
    double triangle_constant() const;

private:
    double value_;
    Regime regime_;
};

Regime classify(double r);

} // namespace momentlab
