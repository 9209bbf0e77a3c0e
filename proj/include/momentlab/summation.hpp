#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace momentlab {

// Neumaier's variant of Kahan summation.
class NeumaierSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            compensation_ += (sum_ - t) + x;
        else
            compensation_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

// Compensated sum of the terms taken in descending order of magnitude.
inline double sum_descending(std::vector<double> terms)
{
    std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::fabs(a) > std::fabs(b); });
    NeumaierSum s;
    for (double t : terms)
        s.add(t);
    return s.value();
}

} // namespace momentlab
