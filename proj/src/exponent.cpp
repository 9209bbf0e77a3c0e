#include "momentlab/exponent.hpp"

#include <cmath>
#include <string>

#include "momentlab/error.hpp"

namespace momentlab {

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::Subadditive: return "subadditive";
    case Regime::Convex: return "convex";
    case Regime::Quadratic: return "quadratic";
    case Regime::Failure: return "failure";
    case Regime::Negative: return "negative";
    }
    return "unknown";
}

Regime classify(double r)
{
    if (!std::isfinite(r))
        throw RegimeError("exponent must be finite");
    if (r == 0.0)
        throw RegimeError("r = 0 is degenerate (both moments equal 1)");
    if (r < 0.0)
        return Regime::Negative;
    if (r <= 1.0)
        return Regime::Subadditive;
    if (r < 2.0)
        return Regime::Convex;
    if (r == 2.0)
        return Regime::Quadratic;
    return Regime::Failure;
}

RExponent::RExponent(double value) : value_(value), regime_(classify(value)) {}

double RExponent::triangle_constant() const
{
    switch (regime_) {
    case Regime::Subadditive: return 1.0;
    case Regime::Convex: return std::exp2(value_ - 1.0);
    default:
        throw RegimeError("A_r is only used for 0 < r < 2, got r = " + std::to_string(value_));
    }
}

} // namespace momentlab
