#include "momentlab/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "momentlab/error.hpp"
#include "momentlab/quadrature.hpp"
#include "momentlab/sampling.hpp"
#include "momentlab/summation.hpp"

namespace momentlab {

namespace {

constexpr double kProbeBound = 1e8;
constexpr int kSignCellsPerInterval = 8;

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double eval_probe(const Probe& probe, double x)
{
    if (const auto* e = std::get_if<Expr>(&probe))
        return e->eval(x);
    return std::get<StepProbe>(probe)(x);
}

std::string describe(const Probe& probe)
{
    if (const auto* e = std::get_if<Expr>(&probe))
        return e->to_string();
    return std::get<StepProbe>(probe).describe();
}

// Breakpoints of the probe inside [lo, hi], plus the ends.
std::vector<double> probe_cuts(const Probe& probe, double lo, double hi)
{
    std::vector<double> cuts{lo, hi};
    if (const auto* step = std::get_if<StepProbe>(&probe))
        for (double c : step->cuts)
            if (c > lo && c < hi)
                cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

void require_bounded(const DensityModel& model, const Probe& probe, int grid)
{
    for (const Interval& iv : model.domain()) {
        for (int k = 0; k <= grid; ++k) {
            const double x = iv.lo + iv.length() * k / grid;
            double v = 0.0;
            try {
                v = eval_probe(probe, x);
            } catch (const DomainError&) {
                throw UnboundedProbe("probe " + describe(probe) + " is undefined at x = " + std::to_string(x));
            }
            if (!std::isfinite(v) || std::fabs(v) > kProbeBound)
                throw UnboundedProbe("probe " + describe(probe) + " reaches " + std::to_string(v) + " at x = " +
                                     std::to_string(x));
        }
    }
}

// Integral of delta over [lo, hi], split at the probe's own breakpoints.
double probe_integral(const Probe& probe, double lo, double hi, double rel_tol)
{
    const auto cuts = probe_cuts(probe, lo, hi);
    NeumaierSum sum;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        sum.add(quad::gauss_kronrod([&](double x) { return eval_probe(probe, x); }, cuts[i], cuts[i + 1], rel_tol,
                                    1e-15 * (cuts[i + 1] - cuts[i]))
                    .value);
    return sum.value();
}

// Probe moments g_k = integral of delta * b_k for each mixture or product
// component, together with the component Gram matrix W so that the form is
// g^T W g.
struct ComponentForm {
    std::vector<double> g;
    Eigen::MatrixXd w;
};

ComponentForm component_form(const DensityModel& model, const Probe& probe, double rel_tol)
{
    ComponentForm out;
    if (const auto* prod = std::get_if<ProductKernel>(&model.kernel())) {
        double total = 0.0;
        for (const auto& pc : prod->marginal)
            total += pc.density * probe_integral(probe, pc.lo, pc.hi, rel_tol);
        out.g = {total};
        out.w = Eigen::MatrixXd::Constant(1, 1, model.normalization_constant());
        return out;
    }
    const auto& mix = std::get<MixtureUniform>(model.kernel());
    for (const auto& comp : mix.components)
        out.g.push_back(probe_integral(probe, comp.center - comp.halfwidth, comp.center + comp.halfwidth, rel_tol) /
                        (2.0 * comp.halfwidth));
    out.w = model.normalization_constant() * mix.joint;
    return out;
}

double gram_value(const ComponentForm& form)
{
    NeumaierSum sum;
    const auto n = static_cast<Eigen::Index>(form.g.size());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            sum.add(form.g[i] * form.g[j] * form.w(i, j));
    return sum.value();
}

} // namespace

std::string_view to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::Certified: return "certified";
    case Verdict::NotFalsified: return "not_falsified";
    case Verdict::Falsified: return "falsified";
    }
    return "unknown";
}

PositivityReport check_psd_discrete(const DiscreteJoint& model, double tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.weights());
    if (solver.info() != Eigen::Success)
        throw InvariantViolation("symmetric eigen-decomposition did not converge");
    const double lambda_min = solver.eigenvalues()(0);
    const double scale = inf_norm(model.weights());

    PositivityReport report;
    report.method = "symmetric-eigendecomposition";
    report.min_value = lambda_min;
    report.truncated = !model.is_finite();
    if (lambda_min >= -tol * scale) {
        report.verdict = report.truncated ? Verdict::NotFalsified : Verdict::Certified;
        return report;
    }
    report.verdict = Verdict::Falsified;
    Eigen::VectorXd v = solver.eigenvectors().col(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::fabs(v(i)) > 1e-14) {
            if (v(i) < 0.0)
                v = -v;
            break;
        }
    }
    report.witness = std::vector<double>(v.data(), v.data() + v.size());
    std::ostringstream desc;
    desc << "eigenvector of lambda_min over atoms (";
    for (std::size_t i = 0; i < model.size(); ++i)
        desc << (i ? ", " : "") << model.atoms()[i];
    desc << ")";
    report.witness_description = desc.str();
    return report;
}

double StepProbe::operator()(double x) const
{
    const auto k = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
    return values.at(k);
}

std::string StepProbe::describe() const
{
    std::ostringstream out;
    out << "step(";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0)
            out << " |" << cuts[k - 1] << "| ";
        out << values[k];
    }
    out << ")";
    return out.str();
}

double density_quadratic_form(const DensityModel& model, const Probe& probe, double rel_tol)
{
    if (const auto* step = std::get_if<StepProbe>(&probe); step && step->values.size() != step->cuts.size() + 1)
        throw InvalidArgument("step probe needs one more value than cuts");
    if (!std::holds_alternative<CauchyKernel>(model.kernel()))
        return gram_value(component_form(model, probe, rel_tol));

    NeumaierSum sum;
    for (const Interval& ix : model.domain()) {
        for (const Interval& iy : model.domain()) {
            const auto xs = probe_cuts(probe, ix.lo, ix.hi);
            const auto ys = probe_cuts(probe, iy.lo, iy.hi);
            for (std::size_t i = 0; i + 1 < xs.size(); ++i)
                for (std::size_t j = 0; j + 1 < ys.size(); ++j)
                    sum.add(quad::integrate_rect(
                                {{xs[i], xs[i + 1]}, {ys[j], ys[j + 1]}},
                                [&](double x, double y) {
                                    return eval_probe(probe, x) * eval_probe(probe, y) * model.density(x, y);
                                },
                                rel_tol)
                                .value);
        }
    }
    return sum.value();
}

PositivityReport probe_density_positivity(const DensityModel& model, std::span<const Probe> probes, int grid,
                                          double tol, std::uint64_t seed)
{
    if (grid < 64)
        throw InvalidArgument("probe grid needs at least 64 points per interval, got " + std::to_string(grid));

    PositivityReport report;
    report.seed = seed;
    report.min_value = std::numeric_limits<double>::infinity();

    auto consider = [&](double value, const std::string& description) {
        if (value < report.min_value) {
            report.min_value = value;
            report.witness_description = description;
        }
    };

    for (const Probe& probe : probes) {
        require_bounded(model, probe, grid);
        consider(density_quadratic_form(model, probe), describe(probe));
    }

    // Random sign probes, constant on kSignCellsPerInterval cells of each
    // domain interval. Their forms are s^T M s with M the cell-mass matrix.
    std::vector<Interval> cells;
    for (const Interval& iv : model.domain())
        for (int k = 0; k < kSignCellsPerInterval; ++k)
            cells.push_back({iv.lo + iv.length() * k / kSignCellsPerInterval,
                             iv.lo + iv.length() * (k + 1) / kSignCellsPerInterval});
    const auto m = static_cast<Eigen::Index>(cells.size());
    Eigen::MatrixXd mass(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            double v = 0.0;
            if (std::holds_alternative<CauchyKernel>(model.kernel())) {
                v = quad::integrate_rect({cells[i], cells[j]},
                                         [&](double x, double y) { return model.density(x, y); }, 1e-10)
                        .value;
            } else {
                StepProbe ind_i{{cells[i].lo, cells[i].hi}, {0.0, 1.0, 0.0}};
                StepProbe ind_j{{cells[j].lo, cells[j].hi}, {0.0, 1.0, 0.0}};
                const auto fi = component_form(model, ind_i, 1e-12);
                const auto fj = component_form(model, ind_j, 1e-12);
                NeumaierSum s;
                for (std::size_t k = 0; k < fi.g.size(); ++k)
                    for (std::size_t l = 0; l < fj.g.size(); ++l)
                        s.add(fi.g[k] * fj.g[l] * fi.w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)));
                v = s.value();
            }
            mass(i, j) = v;
            mass(j, i) = v;
        }
    }
    std::mt19937_64 rng(splitmix64(seed));
    Eigen::VectorXd signs(m);
    for (int probe = 0; probe < grid; ++probe) {
        for (Eigen::Index i = 0; i < m; ++i)
            signs(i) = (rng() >> 63) ? 1.0 : -1.0;
        const double value = signs.dot(mass * signs);
        if (value < report.min_value) {
            std::ostringstream desc;
            desc << "random sign probe #" << probe << " (seed " << seed << ")";
            consider(value, desc.str());
        }
    }

    const double threshold = -tol;
    if (model.is_product()) {
        report.method = "product-square";
        report.verdict = Verdict::Certified;
    } else if (const auto* mix = std::get_if<MixtureUniform>(&model.kernel())) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mix->joint, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues()(0) >= -tol * inf_norm(mix->joint)) {
            report.method = "component-gram";
            report.verdict = Verdict::Certified;
        } else {
            report.method = "probe-quadrature";
            report.verdict = report.min_value < threshold ? Verdict::Falsified : Verdict::NotFalsified;
        }
    } else {
        report.method = "probe-quadrature";
        report.verdict = report.min_value < threshold ? Verdict::Falsified : Verdict::NotFalsified;
    }
    if (report.verdict == Verdict::Certified && report.min_value < threshold)
        throw InvariantViolation("closed-form certificate contradicted by probe value " +
                                 std::to_string(report.min_value));
    return report;
}

PositivityReport probe_density_positivity(const DensityModel& model, std::span<const Expr> probes, int grid,
                                          double tol, std::uint64_t seed)
{
    std::vector<Probe> wrapped(probes.begin(), probes.end());
    return probe_density_positivity(model, std::span<const Probe>(wrapped), grid, tol, seed);
}

double sin_quadratic_form(const DiscreteJoint& model, double t)
{
    const auto& a = model.atoms();
    const auto& p = model.weights();
    std::vector<double> s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        s[i] = std::sin(t * a[i]);
    NeumaierSum sum;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            sum.add(s[i] * s[j] * p(i, j));
    return sum.value();
}

double cauchy_positivity_witness(std::span<const double> c, std::span<const double> eta)
{
    if (c.size() != eta.size())
        throw InvalidArgument("c and eta must have the same length");
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!(c[i] > 0.0) || !std::isfinite(c[i]))
            throw NonPositiveParameter("c[" + std::to_string(i) + "] = " + std::to_string(c[i]));
    NeumaierSum sum;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j)
            sum.add(eta[i] * eta[j] / (c[i] + c[j]));
    return sum.value();
}

} // namespace momentlab
