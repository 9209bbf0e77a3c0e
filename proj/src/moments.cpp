#include "momentlab/moments.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "momentlab/error.hpp"
#include "momentlab/quadrature.hpp"
#include "momentlab/summation.hpp"

namespace momentlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_factor(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

// A rectangle of D^2 on which the joint density is `weight` (constant when
// `smooth` is null, otherwise weight * smooth(x, y)).
struct Cell {
    quad::Rect rect;
    double weight;
    double multiplicity; // 2 for an off-diagonal cell standing in for its mirror
};

std::vector<Cell> density_cells(const DensityModel& model)
{
    std::vector<Cell> cells;
    const double norm = model.normalization_constant();
    if (const auto* prod = std::get_if<ProductKernel>(&model.kernel())) {
        const auto& pieces = prod->marginal;
        for (std::size_t i = 0; i < pieces.size(); ++i)
            for (std::size_t j = i; j < pieces.size(); ++j)
                cells.push_back({{{pieces[i].lo, pieces[i].hi}, {pieces[j].lo, pieces[j].hi}},
                                 norm * pieces[i].density * pieces[j].density, i == j ? 1.0 : 2.0});
    } else if (const auto* mix = std::get_if<MixtureUniform>(&model.kernel())) {
        const auto& comps = mix->components;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            for (std::size_t l = k; l < comps.size(); ++l) {
                const double w = mix->joint(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
                if (w == 0.0)
                    continue;
                const Interval bx{comps[k].center - comps[k].halfwidth, comps[k].center + comps[k].halfwidth};
                const Interval by{comps[l].center - comps[l].halfwidth, comps[l].center + comps[l].halfwidth};
                cells.push_back({{bx, by}, norm * w / (bx.length() * by.length()), k == l ? 1.0 : 2.0});
            }
        }
    } else {
        const auto& dom = model.domain();
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = i; j < dom.size(); ++j)
                cells.push_back({{dom[i], dom[j]}, 1.0, i == j ? 1.0 : 2.0});
    }
    return cells;
}

// Length of {x in X : -s x in Y}, the part of the kink line inside the cell.
double kink_overlap(const quad::Rect& rect, double s)
{
    const double lo = s > 0 ? -rect.y.hi : rect.y.lo;
    const double hi = s > 0 ? -rect.y.lo : rect.y.hi;
    return std::min(hi, rect.x.hi) - std::max(lo, rect.x.lo);
}

} // namespace

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::Exact: return "exact";
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "monte-carlo";
    }
    return "unknown";
}

Method parse_method(std::string_view text)
{
    if (text == "exact")
        return Method::Exact;
    if (text == "quadrature")
        return Method::Quadrature;
    if (text == "mc" || text == "monte-carlo")
        return Method::MonteCarlo;
    throw InvalidArgument("unknown method '" + std::string(text) + "' (expected exact, quadrature or mc)");
}

MomentEstimate moment_discrete(const DiscreteJoint& model, const RExponent& r, Sign sign)
{
    const double s = sign_factor(sign);
    const auto& a = model.atoms();
    const auto& p = model.weights();
    const auto n = static_cast<Eigen::Index>(a.size());
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n * n));
    double max_power = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double z = std::fabs(a[i] + s * a[j]);
            const double zr = std::pow(z, r.value());
            max_power = std::max(max_power, zr);
            if (p(i, j) == 0.0)
                continue;
            terms.push_back(p(i, j) * zr);
        }
    }

    MomentEstimate est;
    est.method = Method::Exact;
    est.n = static_cast<std::int64_t>(terms.size());
    for (double t : terms) {
        if (std::isinf(t)) {
            est.value = kInf;
            return est;
        }
    }
    est.value = sum_descending(terms);
    // pow and the products are correctly rounded to a few ulps; the
    // compensated sum adds at most 2 eps |sum|.
    est.abs_error_bound = 4.0 * kEps * std::fabs(est.value);
    if (!model.is_finite()) {
        est.abs_error_bound += model.tail_mass_bound() * max_power;
        est.heuristic_bound = true;
    }
    return est;
}

MomentEstimate expectation_xy(const DiscreteJoint& model)
{
    const auto& a = model.atoms();
    const auto& p = model.weights();
    std::vector<double> terms;
    double abs_sum = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double t = a[i] * a[j] * p(i, j);
            terms.push_back(t);
            abs_sum += std::fabs(t);
        }
    }
    MomentEstimate est;
    est.value = sum_descending(std::move(terms));
    est.abs_error_bound = 4.0 * kEps * abs_sum;
    est.method = Method::Exact;
    est.n = p.size();
    return est;
}

MomentEstimate expectation_xy(const DensityModel& model, double rel_tol)
{
    MomentEstimate est;
    if (const auto* prod = std::get_if<ProductKernel>(&model.kernel())) {
        NeumaierSum mean;
        for (const auto& pc : prod->marginal)
            mean.add(pc.density * 0.5 * (pc.hi - pc.lo) * (pc.hi + pc.lo));
        const double m = mean.value() * model.normalization_constant();
        est.value = m * m;
        est.abs_error_bound = 8.0 * kEps * est.value;
        est.method = Method::Exact;
        est.n = static_cast<std::int64_t>(prod->marginal.size());
        return est;
    }
    if (const auto* mix = std::get_if<MixtureUniform>(&model.kernel())) {
        NeumaierSum sum;
        double abs_sum = 0.0;
        const auto n = static_cast<Eigen::Index>(mix->components.size());
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index l = 0; l < n; ++l) {
                const double t = mix->joint(k, l) * mix->components[k].center * mix->components[l].center;
                sum.add(t);
                abs_sum += std::fabs(t);
            }
        est.value = sum.value() * model.normalization_constant();
        est.abs_error_bound = 8.0 * kEps * abs_sum;
        est.method = Method::Exact;
        est.n = n * n;
        return est;
    }
    NeumaierSum sum;
    double err = 0.0;
    for (const Interval& ix : model.domain()) {
        for (const Interval& iy : model.domain()) {
            const auto res =
                quad::integrate_rect({ix, iy}, [&](double x, double y) { return x * y * model.density(x, y); },
                                     rel_tol);
            sum.add(res.value);
            err += res.abs_error;
            est.n += static_cast<std::int64_t>(res.panels);
        }
    }
    est.value = sum.value();
    est.abs_error_bound = err;
    est.method = Method::Quadrature;
    return est;
}

MomentEstimate moment_density_quadrature(const DensityModel& model, const RExponent& r, Sign sign, double rel_tol)
{
    if (!(rel_tol >= 1e-12))
        throw InvalidArgument("quadrature rel_tol must be at least 1e-12");
    const double s = sign_factor(sign);
    const double rv = r.value();
    const std::vector<Cell> cells = density_cells(model);

    MomentEstimate est;
    est.method = Method::Quadrature;

    if (rv <= -1.0) {
        for (const Cell& cell : cells) {
            const double overlap = kink_overlap(cell.rect, s);
            if (overlap > 0.0 || (overlap == 0.0 && rv <= -2.0)) {
                est.value = kInf;
                return est;
            }
        }
    }

    const bool smooth = std::holds_alternative<CauchyKernel>(model.kernel());
    quad::Fn2 weight;
    if (smooth)
        weight = [&model](double x, double y) { return model.density(x, y); };

    NeumaierSum total;
    double err = 0.0;
    for (const Cell& cell : cells) {
        const auto res = quad::integrate_abs_power(cell.rect, rv, s > 0 ? 1 : -1, weight, rel_tol);
        total.add(cell.multiplicity * cell.weight * res.value);
        err += cell.multiplicity * cell.weight * res.abs_error;
        est.n += static_cast<std::int64_t>(res.panels);
    }
    est.value = total.value();
    est.abs_error_bound = err;
    if (err > 10.0 * rel_tol * std::fabs(est.value) && err > 1e-300)
        throw ToleranceNotMet("density moment quadrature", err);
    return est;
}

MomentPair moment_pair(const Model& model, const RExponent& r, const DeltaOptions& options)
{
    MomentPair out;
    if (const auto* discrete = std::get_if<DiscreteJoint>(&model)) {
        switch (options.method) {
        case Method::Exact:
            out.plus = moment_discrete(*discrete, r, Sign::Plus);
            out.minus = moment_discrete(*discrete, r, Sign::Minus);
            break;
        case Method::Quadrature: {
            if (r.value() < 0.0)
                throw InvalidArgument("quadrature on a discrete model needs r > 0");
            const DensityModel smoothed = smooth_discrete(*discrete, options.smoothing_epsilon);
            out.plus = moment_density_quadrature(smoothed, r, Sign::Plus, options.rel_tol);
            out.minus = moment_density_quadrature(smoothed, r, Sign::Minus, options.rel_tol);
            // E| |z + w|^r - |z|^r | for |w| <= 2 eps, averaged over the atoms.
            const double w = 2.0 * options.smoothing_epsilon;
            const double rv = r.value();
            const auto& a = discrete->atoms();
            const auto& p = discrete->weights();
            for (Sign sg : {Sign::Plus, Sign::Minus}) {
                double bias = 0.0;
                for (Eigen::Index i = 0; i < p.rows(); ++i)
                    for (Eigen::Index j = 0; j < p.cols(); ++j) {
                        const double z = std::fabs(a[i] + sign_factor(sg) * a[j]);
                        bias += p(i, j) * (rv <= 1.0 ? std::pow(w, rv) : rv * std::pow(z + w, rv - 1.0) * w);
                    }
                (sg == Sign::Plus ? out.plus : out.minus).abs_error_bound += bias;
            }
            break;
        }
        case Method::MonteCarlo:
            out.plus = moment_monte_carlo(model, r, Sign::Plus, options.mc_samples, options.seed, options.workers);
            out.minus = moment_monte_carlo(model, r, Sign::Minus, options.mc_samples, options.seed, options.workers);
            break;
        }
    } else {
        const auto& density = std::get<DensityModel>(model);
        switch (options.method) {
        case Method::Exact:
            throw InvalidArgument("exact summation is only available for discrete models");
        case Method::Quadrature:
            out.plus = moment_density_quadrature(density, r, Sign::Plus, options.rel_tol);
            out.minus = moment_density_quadrature(density, r, Sign::Minus, options.rel_tol);
            break;
        case Method::MonteCarlo:
            out.plus = moment_monte_carlo(model, r, Sign::Plus, options.mc_samples, options.seed, options.workers);
            out.minus = moment_monte_carlo(model, r, Sign::Minus, options.mc_samples, options.seed, options.workers);
            break;
        }
    }

    out.delta.method = out.plus.method;
    out.delta.n = out.plus.n;
    out.delta.seed = out.plus.seed;
    out.delta.heuristic_bound = out.plus.heuristic_bound || out.minus.heuristic_bound;
    if (std::isinf(out.plus.value) && std::isinf(out.minus.value)) {
        out.delta.value = std::numeric_limits<double>::quiet_NaN();
        out.delta.abs_error_bound = kInf;
    } else {
        out.delta.value = out.plus.value - out.minus.value;
        out.delta.abs_error_bound = out.plus.abs_error_bound + out.minus.abs_error_bound;
    }
    return out;
}

MomentEstimate delta(const Model& model, const RExponent& r, const DeltaOptions& options)
{
    return moment_pair(model, r, options).delta;
}

} // namespace momentlab
