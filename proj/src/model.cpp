#include "momentlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momentlab/error.hpp"
#include "momentlab/quadrature.hpp"
#include "momentlab/summation.hpp"

namespace momentlab {

namespace {

constexpr double kNormalizationTol = 1e-9;
constexpr double kSymmetryTol = 1e-12;

void require_distinct(std::span<const double> atoms)
{
    std::vector<double> sorted(atoms.begin(), atoms.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1])
            throw DuplicateAtom("atom " + std::to_string(sorted[i]) + " is listed twice");
}

void require_positive(std::span<const double> values, const char* name)
{
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw NonPositiveParameter(std::string(name) + "[" + std::to_string(i) +
                                       "] = " + std::to_string(values[i]) + " must be positive and finite");
}

double matrix_sum(const Eigen::MatrixXd& m)
{
    NeumaierSum sum;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            sum.add(m(i, j));
    return sum.value();
}

Eigen::MatrixXd cauchy_matrix(std::span<const double> c, std::span<const double> d)
{
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd p(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            p(i, j) = d[i] * d[j] / (c[i] + c[j]);
    return p;
}

std::vector<Interval> validate_domain(std::vector<Interval> domain)
{
    if (domain.empty())
        throw InvalidArgument("density domain is empty");
    std::sort(domain.begin(), domain.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const Interval& iv = domain[i];
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
            throw InvalidArgument("domain interval [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                                  "] must be bounded with lo < hi");
        if (i > 0 && !(domain[i - 1].hi < iv.lo))
            throw InvalidArgument("domain intervals must be disjoint");
    }
    return domain;
}

// Union of closed intervals; touching or overlapping pieces are merged.
std::vector<Interval> merge_intervals(std::vector<Interval> pieces)
{
    std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const Interval& iv : pieces) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return merged;
}

double uniform_density(const UniformComponent& c, double x)
{
    return std::fabs(x - c.center) <= c.halfwidth ? 0.5 / c.halfwidth : 0.0;
}

} // namespace

DiscreteJoint::DiscreteJoint(std::vector<double> atoms, Eigen::MatrixXd weights, double tail_mass_bound)
    : atoms_(std::move(atoms)), weights_(std::move(weights)), tail_mass_bound_(tail_mass_bound)
{
    const auto n = static_cast<Eigen::Index>(atoms_.size());
    if (n == 0)
        throw InvalidArgument("a discrete model needs at least one atom");
    if (weights_.rows() != n || weights_.cols() != n)
        throw InvalidArgument("weight matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (double a : atoms_)
        if (!std::isfinite(a))
            throw InvalidArgument("atoms must be finite");
    require_distinct(atoms_);
    if (!(tail_mass_bound_ >= 0.0) || !(tail_mass_bound_ < 1.0))
        throw InvalidArgument("tail mass bound must lie in [0, 1)");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(weights_(i, j) >= 0.0) || !std::isfinite(weights_(i, j)))
                throw NegativeWeight("p[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                     std::to_string(weights_(i, j)));
            if (weights_(i, j) != weights_(j, i))
                throw AsymmetricInput("p[" + std::to_string(i) + "][" + std::to_string(j) + "] != p[" +
                                      std::to_string(j) + "][" + std::to_string(i) + "]");
        }
    }
    const double total = matrix_sum(weights_);
    if (std::fabs(total + tail_mass_bound_ - 1.0) > kNormalizationTol)
        throw NotNormalized("weights sum to " + std::to_string(total) + " with tail bound " +
                            std::to_string(tail_mass_bound_));
}

std::vector<double> DiscreteJoint::marginal() const
{
    std::vector<double> m(atoms_.size());
    for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
        NeumaierSum row;
        for (Eigen::Index j = 0; j < weights_.cols(); ++j)
            row.add(weights_(i, j));
        m[static_cast<std::size_t>(i)] = row.value();
    }
    return m;
}

DensityModel::DensityModel(std::vector<Interval> domain, Kernel kernel, double normalization_constant)
    : domain_(validate_domain(std::move(domain))), kernel_(std::move(kernel)), normalization_(normalization_constant)
{
    if (!(normalization_ > 0.0) || !std::isfinite(normalization_))
        throw InvalidArgument("normalization constant must be positive and finite");
}

bool DensityModel::is_product() const noexcept
{
    if (std::holds_alternative<ProductKernel>(kernel_))
        return true;
    if (const auto* mix = std::get_if<MixtureUniform>(&kernel_)) {
        const auto n = static_cast<Eigen::Index>(mix->components.size());
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (mix->joint(i, j) != mix->components[i].mass * mix->components[j].mass)
                    return false;
        return true;
    }
    return false;
}

double DensityModel::marginal_density(double x) const
{
    if (const auto* prod = std::get_if<ProductKernel>(&kernel_)) {
        for (const auto& piece : prod->marginal)
            if (x >= piece.lo && x <= piece.hi)
                return normalization_ * piece.density;
        return 0.0;
    }
    if (const auto* mix = std::get_if<MixtureUniform>(&kernel_)) {
        double h = 0.0;
        const auto n = static_cast<Eigen::Index>(mix->components.size());
        for (Eigen::Index k = 0; k < n; ++k) {
            const double b = uniform_density(mix->components[k], x);
            if (b != 0.0)
                h += b * mix->joint.row(k).sum();
        }
        return normalization_ * h;
    }
    bool inside = false;
    for (const Interval& iv : domain_)
        inside = inside || iv.contains(x);
    if (!inside)
        return 0.0;
    double total = 0.0;
    for (const Interval& iv : domain_)
        total += quad::tanh_sinh([&](double y) { return density(x, y); }, iv.lo, iv.hi, 1e-11, 0.0).value;
    return total;
}

double DensityModel::density(double x, double y) const
{
    if (const auto* cauchy = std::get_if<CauchyKernel>(&kernel_)) {
        bool in_x = false, in_y = false;
        for (const Interval& iv : domain_) {
            in_x = in_x || iv.contains(x);
            in_y = in_y || iv.contains(y);
        }
        if (!in_x || !in_y)
            return 0.0;
        return normalization_ * (cauchy->d.eval(x) * cauchy->d.eval(y)) / (cauchy->c.eval(x) + cauchy->c.eval(y));
    }
    if (std::holds_alternative<ProductKernel>(kernel_))
        return marginal_density(x) * marginal_density(y) / normalization_;
    const auto& mix = std::get<MixtureUniform>(kernel_);
    double f = 0.0;
    const auto n = static_cast<Eigen::Index>(mix.components.size());
    for (Eigen::Index k = 0; k < n; ++k) {
        const double bx = uniform_density(mix.components[k], x);
        if (bx == 0.0)
            continue;
        for (Eigen::Index l = 0; l < n; ++l)
            f += mix.joint(k, l) * bx * uniform_density(mix.components[l], y);
    }
    return normalization_ * f;
}

DiscreteJoint build_cauchy_discrete(std::span<const double> atoms, std::span<const double> c,
                                    std::span<const double> d, bool normalize)
{
    if (atoms.size() != c.size() || atoms.size() != d.size())
        throw InvalidArgument("atoms, c and d must have the same length");
    if (atoms.empty())
        throw InvalidArgument("a discrete model needs at least one atom");
    require_positive(c, "c");
    require_positive(d, "d");
    require_distinct(atoms);

    std::vector<double> dd(d.begin(), d.end());
    Eigen::MatrixXd p = cauchy_matrix(c, dd);
    const double total = matrix_sum(p);
    if (normalize) {
        // Scaling d by s scales every weight by s^2.
        const double scale = 1.0 / std::sqrt(total);
        for (double& v : dd)
            v *= scale;
        p = cauchy_matrix(c, dd);
    } else if (std::fabs(total - 1.0) > kNormalizationTol) {
        throw NotNormalized("Cauchy weights sum to " + std::to_string(total));
    }
    return DiscreteJoint(std::vector<double>(atoms.begin(), atoms.end()), std::move(p));
}

DiscreteJoint build_general_discrete(std::span<const double> atoms, const Eigen::MatrixXd& weights)
{
    const auto n = static_cast<Eigen::Index>(atoms.size());
    if (weights.rows() != weights.cols())
        throw InvalidArgument("weight matrix must be square");
    if (weights.rows() != n)
        throw InvalidArgument("weight matrix size does not match the number of atoms");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(weights(i, j) >= 0.0))
                throw NegativeWeight("p[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                     std::to_string(weights(i, j)));
            if (std::fabs(weights(i, j) - weights(j, i)) > kSymmetryTol)
                throw AsymmetricInput("|p[" + std::to_string(i) + "][" + std::to_string(j) + "] - p[" +
                                      std::to_string(j) + "][" + std::to_string(i) + "]| exceeds 1e-12");
        }
    }
    const double total = matrix_sum(weights);
    if (std::fabs(total - 1.0) > kNormalizationTol)
        throw NotNormalized("weights sum to " + std::to_string(total));
    Eigen::MatrixXd sym = 0.5 * (weights + weights.transpose());
    return DiscreteJoint(std::vector<double>(atoms.begin(), atoms.end()), std::move(sym));
}

DiscreteJoint truncate_countable(const Expr& rule_a, const Expr& rule_c, const Expr& rule_d, int m)
{
    if (m < 1)
        throw InvalidArgument("truncation size must be at least 1, got " + std::to_string(m));
    std::vector<double> a(m), c(m), d(m);
    for (int i = 0; i < m; ++i) {
        const double index = i + 1;
        a[i] = rule_a.eval(index);
        c[i] = rule_c.eval(index);
        d[i] = rule_d.eval(index);
    }
    require_positive(c, "c");
    require_positive(d, "d");
    require_distinct(a);
    Eigen::MatrixXd p = cauchy_matrix(c, d);
    const double partial = matrix_sum(p);
    if (partial > 1.0 + kNormalizationTol)
        throw NotNormalized("partial sum " + std::to_string(partial) + " over indices 1.." + std::to_string(m) +
                            " already exceeds 1");
    const double tail = std::max(0.0, 1.0 - partial);
    if (tail >= 0.1)
        throw TailTooHeavy("mass outside indices 1.." + std::to_string(m) + " is " + std::to_string(tail));
    return DiscreteJoint(std::move(a), std::move(p), tail);
}

TwoPointLaw build_counterexample(const RExponent& r)
{
    if (r.regime() != Regime::Failure)
        throw RegimeError("the two-point counterexample needs r > 2, got r = " + std::to_string(r.value()));
    const double rv = r.value();
    const double log2_a = 2.0 * rv / (rv - 2.0);
    const double high = std::exp2(log2_a);
    if (!std::isfinite(high))
        throw RegimeError("r = " + std::to_string(rv) + " is too close to 2: A = 2^(2r/(r-2)) overflows");
    const double p = rv * std::exp2(-rv - log2_a);
    const TwoPointLaw law{high, -1.0, p, 1.0 - p, rv};
    if (!(law.p > 0.0 && law.p < 0.5 && law.q > 0.5 && law.high_atom > 1.0))
        throw InvariantViolation("two-point law violates 0 < p < 1/2 < q, A > 1");
    return law;
}

DiscreteJoint to_discrete(const TwoPointLaw& law)
{
    Eigen::MatrixXd w(2, 2);
    w << law.p * law.p, law.p * law.q, law.q * law.p, law.q * law.q;
    return DiscreteJoint({law.high_atom, law.low_atom}, std::move(w));
}

DensityModel build_smoothed(const TwoPointLaw& law, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw EpsilonOutOfRange("need 0 < epsilon < 1/2, got " + std::to_string(epsilon));
    const double lo = law.low_atom;
    const double hi = law.high_atom;
    ProductKernel kernel;
    kernel.marginal = {
        {lo - epsilon, lo + epsilon, law.q / (2.0 * epsilon)},
        {hi - epsilon, hi + epsilon, law.p / (2.0 * epsilon)},
    };
    return DensityModel({{lo - epsilon, lo + epsilon}, {hi - epsilon, hi + epsilon}}, std::move(kernel), 1.0);
}

DensityModel build_uniform_remark()
{
    return DensityModel({{1.0, 2.0}}, ProductKernel{{{1.0, 2.0, 1.0}}}, 1.0);
}

DensityModel build_cauchy_density(const Expr& c, const Expr& d, std::vector<Interval> domain)
{
    domain = validate_domain(std::move(domain));
    constexpr int kGrid = 1024;
    for (const Interval& iv : domain) {
        for (int k = 0; k <= kGrid; ++k) {
            const double x = iv.lo + iv.length() * k / kGrid;
            const double cv = c.eval(x);
            const double dv = d.eval(x);
            if (!(cv > 0.0) || !std::isfinite(cv))
                throw NonPositiveParameter("c(" + std::to_string(x) + ") = " + std::to_string(cv));
            if (!(dv > 0.0) || !std::isfinite(dv))
                throw NonPositiveParameter("d(" + std::to_string(x) + ") = " + std::to_string(dv));
        }
    }
    auto raw = [&](double x, double y) { return d.eval(x) * d.eval(y) / (c.eval(x) + c.eval(y)); };
    NeumaierSum total;
    for (const Interval& ix : domain)
        for (const Interval& iy : domain)
            total.add(quad::integrate_rect({ix, iy}, raw, 1e-13).value);
    return DensityModel(std::move(domain), CauchyKernel{c, d}, 1.0 / total.value());
}

DensityModel build_product_density(std::vector<PiecewisePiece> pieces)
{
    if (pieces.empty())
        throw InvalidArgument("product density needs at least one piece");
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    NeumaierSum mass;
    std::vector<Interval> support;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        if (!std::isfinite(pc.lo) || !std::isfinite(pc.hi) || !(pc.lo < pc.hi))
            throw InvalidArgument("piece bounds must be finite with lo < hi");
        if (!(pc.density > 0.0) || !std::isfinite(pc.density))
            throw NonPositiveParameter("piece density must be positive, got " + std::to_string(pc.density));
        if (i > 0 && pc.lo < pieces[i - 1].hi)
            throw InvalidArgument("marginal pieces overlap");
        mass.add(pc.density * (pc.hi - pc.lo));
        support.push_back({pc.lo, pc.hi});
    }
    if (std::fabs(mass.value() - 1.0) > kNormalizationTol)
        throw NotNormalized("marginal integrates to " + std::to_string(mass.value()));
    return DensityModel(merge_intervals(std::move(support)), ProductKernel{std::move(pieces)}, 1.0);
}

DensityModel build_mixture_density(std::vector<UniformComponent> components)
{
    if (components.empty())
        throw InvalidArgument("mixture needs at least one component");
    NeumaierSum mass;
    std::vector<Interval> support;
    for (const auto& comp : components) {
        if (!std::isfinite(comp.center) || !(comp.halfwidth > 0.0) || !std::isfinite(comp.halfwidth))
            throw NonPositiveParameter("component half-width must be positive and finite");
        if (!(comp.mass > 0.0))
            throw NonPositiveParameter("component mass must be positive");
        mass.add(comp.mass);
        support.push_back({comp.center - comp.halfwidth, comp.center + comp.halfwidth});
    }
    if (std::fabs(mass.value() - 1.0) > kNormalizationTol)
        throw NotNormalized("component masses sum to " + std::to_string(mass.value()));
    const auto n = static_cast<Eigen::Index>(components.size());
    Eigen::MatrixXd joint(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            joint(i, j) = components[i].mass * components[j].mass;
    return DensityModel(merge_intervals(std::move(support)), MixtureUniform{std::move(components), std::move(joint)},
                        1.0);
}

DensityModel smooth_discrete(const DiscreteJoint& model, double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw EpsilonOutOfRange("smoothing half-width must be positive, got " + std::to_string(epsilon));
    if (!model.is_finite())
        throw InvalidArgument("only finite discrete models can be smoothed");
    const std::vector<double> m = model.marginal();
    std::vector<UniformComponent> comps;
    std::vector<Interval> support;
    for (std::size_t i = 0; i < model.size(); ++i) {
        comps.push_back({model.atoms()[i], epsilon, m[i]});
        support.push_back({model.atoms()[i] - epsilon, model.atoms()[i] + epsilon});
    }
    return DensityModel(merge_intervals(std::move(support)), MixtureUniform{std::move(comps), model.weights()}, 1.0);
}

} // namespace momentlab
