#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "momentlab/counterexample.hpp"
#include "momentlab/error.hpp"
#include "momentlab/expr.hpp"
#include "momentlab/model.hpp"
#include "momentlab/model_file.hpp"
#include "momentlab/moments.hpp"
#include "momentlab/positivity.hpp"
#include "momentlab/representation.hpp"
#include "momentlab/verify.hpp"

namespace py = pybind11;
using namespace momentlab;

namespace {

py::dict estimate_dict(const MomentEstimate& e)
{
    py::dict d;
    d["value"] = e.value;
    d["abs_error_bound"] = e.abs_error_bound;
    d["method"] = std::string(to_string(e.method));
    d["n"] = e.n;
    d["seed"] = e.seed ? py::cast(*e.seed) : py::none();
    return d;
}

py::dict positivity_dict(const PositivityReport& p)
{
    py::dict d;
    d["verdict"] = std::string(to_string(p.verdict));
    d["min_value"] = p.min_value;
    d["method"] = p.method;
    d["witness"] = p.witness ? py::cast(*p.witness) : py::none();
    d["truncated"] = p.truncated;
    return d;
}

py::dict values_dict(const BreakdownValues& v)
{
    py::dict d;
    d["e_plus"] = v.e_plus;
    d["e_minus"] = v.e_minus;
    d["delta"] = v.delta;
    d["jensen_lhs"] = v.jensen_lhs;
    d["jensen_rhs"] = v.jensen_rhs;
    d["jensen_gap"] = v.jensen_gap;
    d["jensen_substituted"] = v.jensen_substituted;
    d["chain_bound"] = v.chain_bound;
    return d;
}

DeltaOptions delta_options(const std::string& method, double rel_tol, std::int64_t mc_n, std::uint64_t seed,
                           unsigned workers)
{
    DeltaOptions o;
    o.method = parse_method(method);
    o.rel_tol = rel_tol;
    o.mc_samples = mc_n;
    o.seed = seed;
    o.workers = workers;
    return o;
}

Model to_model(const py::object& obj)
{
    if (py::isinstance<DiscreteJoint>(obj))
        return obj.cast<DiscreteJoint>();
    if (py::isinstance<DensityModel>(obj))
        return obj.cast<DensityModel>();
    throw InvalidArgument("model must be a DiscreteJoint or DensityModel");
}

Sign parse_sign(const std::string& s)
{
    if (s == "plus" || s == "+")
        return Sign::Plus;
    if (s == "minus" || s == "-")
        return Sign::Minus;
    throw InvalidArgument("sign must be 'plus' or 'minus', got '" + s + "'");
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Numerical lab for E|X+Y|^r >= E|X-Y|^r";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<SyntaxError>(m, "SyntaxError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
    py::register_exception<ToleranceNotMet>(m, "ToleranceNotMet", base.ptr());

    py::class_<Expr>(m, "Expr")
        .def("__call__", &Expr::eval, py::arg("value"))
        .def("__str__", &Expr::to_string)
        .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
        .def("depth", &Expr::depth);
    m.def("parse_expr", [](const std::string& text, const std::string& variable) {
        if (variable.size() != 1)
            throw InvalidArgument("variable must be a single character");
        return parse_expr(text, variable[0]);
    }, py::arg("text"), py::arg("variable") = "x");

    py::class_<DiscreteJoint>(m, "DiscreteJoint")
        .def_property_readonly("atoms", &DiscreteJoint::atoms)
        .def_property_readonly("weights", &DiscreteJoint::weights)
        .def_property_readonly("tail_mass_bound", &DiscreteJoint::tail_mass_bound)
        .def("marginal", &DiscreteJoint::marginal);
    py::class_<DensityModel>(m, "DensityModel")
        .def("density", &DensityModel::density, py::arg("x"), py::arg("y"))
        .def("marginal_density", &DensityModel::marginal_density, py::arg("x"))
        .def_property_readonly("domain", [](const DensityModel& d) {
            std::vector<std::pair<double, double>> out;
            for (const auto& iv : d.domain())
                out.emplace_back(iv.lo, iv.hi);
            return out;
        });

    m.def("cauchy_discrete", [](std::vector<double> atoms, std::vector<double> c, std::vector<double> d,
                                bool normalize) { return build_cauchy_discrete(atoms, c, d, normalize); },
          py::arg("atoms"), py::arg("c"), py::arg("d"), py::arg("normalize") = true);
    m.def("general_discrete", [](std::vector<double> atoms, const Eigen::MatrixXd& w) {
        return build_general_discrete(atoms, w);
    }, py::arg("atoms"), py::arg("weights"));
    m.def("truncate_countable", [](const std::string& a, const std::string& c, const std::string& d, int m_) {
        return truncate_countable(parse_expr(a, 'i'), parse_expr(c, 'i'), parse_expr(d, 'i'), m_);
    }, py::arg("rule_a"), py::arg("rule_c"), py::arg("rule_d"), py::arg("m"));
    m.def("two_point", [](double r) { return to_discrete(build_counterexample(RExponent(r))); }, py::arg("r"));
    m.def("counterexample_law", [](double r) {
        const auto law = build_counterexample(RExponent(r));
        return py::dict(py::arg("A") = law.high_atom, py::arg("low") = law.low_atom, py::arg("p") = law.p,
                        py::arg("q") = law.q);
    }, py::arg("r"));
    m.def("smoothed", [](double r, double eps) { return build_smoothed(build_counterexample(RExponent(r)), eps); },
          py::arg("r"), py::arg("epsilon"));
    m.def("uniform_remark", &build_uniform_remark);
    m.def("cauchy_density", [](const std::string& c, const std::string& d, std::vector<std::pair<double, double>> dom) {
        std::vector<Interval> domain;
        for (const auto& [lo, hi] : dom)
            domain.push_back({lo, hi});
        return build_cauchy_density(parse_expr(c), parse_expr(d), domain);
    }, py::arg("c"), py::arg("d"), py::arg("domain"));

    m.def("moment", [](const py::object& model_obj, double r, const std::string& sign, const std::string& method,
                       double rel_tol, std::int64_t mc_n, std::uint64_t seed, unsigned workers) {
        const auto pair = moment_pair(to_model(model_obj), RExponent(r), delta_options(method, rel_tol, mc_n, seed, workers));
        return estimate_dict(parse_sign(sign) == Sign::Plus ? pair.plus : pair.minus);
    }, py::arg("model"), py::arg("r"), py::arg("sign"), py::arg("method") = "exact", py::arg("rel_tol") = 1e-8,
       py::arg("mc_n") = 1'000'000, py::arg("seed") = 0, py::arg("workers") = 1);
    m.def("delta", [](const py::object& model_obj, double r, const std::string& method, double rel_tol, std::int64_t mc_n,
                      std::uint64_t seed, unsigned workers) {
        return estimate_dict(delta(to_model(model_obj), RExponent(r), delta_options(method, rel_tol, mc_n, seed, workers)));
    }, py::arg("model"), py::arg("r"), py::arg("method") = "exact", py::arg("rel_tol") = 1e-8,
       py::arg("mc_n") = 1'000'000, py::arg("seed") = 0, py::arg("workers") = 1);
    m.def("expectation_xy", [](const py::object& model_obj) {
        return std::visit([](const auto& mm) { return estimate_dict(expectation_xy(mm)); }, to_model(model_obj));
    }, py::arg("model"));

    m.def("check_psd", [](const DiscreteJoint& model, double tol) {
        return positivity_dict(check_psd_discrete(model, tol));
    }, py::arg("model"), py::arg("tol") = 1e-10);
    m.def("sin_quadratic_form", &sin_quadratic_form, py::arg("model"), py::arg("t"));
    m.def("cauchy_positivity_witness", [](std::vector<double> c, std::vector<double> eta) {
        return cauchy_positivity_witness(c, eta);
    }, py::arg("c"), py::arg("eta"));

    m.def("cr_constant", [](double r) { return cr_constant(RExponent(r)); }, py::arg("r"));
    m.def("cr_reciprocal_check", [](double r, double rel_tol) { return cr_reciprocal_check(RExponent(r), rel_tol); },
          py::arg("r"), py::arg("rel_tol") = 1e-8);
    m.def("phi_n", [](double z, double r, std::int64_t n) {
        return phi_n(z, RExponent(r), TruncationWindow::from_n(n));
    }, py::arg("z"), py::arg("r"), py::arg("n"));
    m.def("truncated_delta", [](const DiscreteJoint& model, double r, std::int64_t n, double rel_tol) {
        const auto t = truncated_delta_channels(model, RExponent(r), TruncationWindow::from_n(n), rel_tol);
        return py::make_tuple(t.integral_channel, t.expectation_channel);
    }, py::arg("model"), py::arg("r"), py::arg("n"), py::arg("rel_tol") = 1e-8);

    m.def("delta_exact", [](double r) {
        const auto b = delta_exact(build_counterexample(RExponent(r)));
        py::dict d;
        d["r"] = b.r;
        d["exact"] = b.exact;
        d["values"] = values_dict(b.values);
        d["floating"] = values_dict(b.floating);
        if (b.rational)
            d["rational"] = py::dict(py::arg("e_plus") = b.rational->e_plus, py::arg("e_minus") = b.rational->e_minus,
                                     py::arg("delta") = b.rational->delta,
                                     py::arg("jensen_lhs") = b.rational->jensen_lhs,
                                     py::arg("jensen_rhs") = b.rational->jensen_rhs,
                                     py::arg("chain_bound") = b.rational->chain_bound);
        return d;
    }, py::arg("r"));
    m.def("smoothed_delta", [](double r, double eps, double rel_tol) {
        return estimate_dict(smoothed_delta(RExponent(r), eps, rel_tol));
    }, py::arg("r"), py::arg("epsilon"), py::arg("rel_tol") = 1e-10);
    m.def("remark_negative_r", [](double r) {
        const auto b = remark_negative_r(RExponent(r));
        py::dict d;
        d["r"] = b.r;
        d["e_plus"] = b.e_plus;
        d["e_plus_bound"] = b.e_plus_bound;
        d["e_minus"] = b.e_minus;
        d["e_minus_infinite"] = b.e_minus_infinite;
        d["e_minus_quadrature"] = b.e_minus_quadrature ? py::cast(*b.e_minus_quadrature) : py::none();
        d["delta"] = b.delta;
        d["fails"] = b.fails;
        return d;
    }, py::arg("r"));
    m.def("search_two_point", [](double r, std::vector<double> a, std::vector<double> p) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& h : search_two_point(RExponent(r), a, p))
            out.emplace_back(h.a, h.p, h.delta);
        return out;
    }, py::arg("r"), py::arg("a_grid"), py::arg("p_grid"));

    m.def("verify_json", [](const std::string& document, std::vector<double> r, std::optional<std::string> method,
                            std::optional<std::int64_t> mc_n, std::optional<std::uint64_t> seed, unsigned workers) {
        VerifyOptions o;
        o.r = std::move(r);
        if (method)
            o.method = parse_method(*method);
        o.mc_n = mc_n;
        o.seed = seed;
        o.workers = workers;
        const auto run = run_verify(parse_model_file(document), o);
        return py::make_tuple(run.report_json, run.all_as_expected);
    }, py::arg("document"), py::arg("r") = std::vector<double>{}, py::arg("method") = py::none(),
       py::arg("mc_n") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = 1);
    m.def("model_digest", [](const std::string& document) { return model_digest(parse_model_file(document)); },
          py::arg("document"));
    m.def("sweep_csv", [](double r, const std::string& a, const std::string& p) {
        return sweep_csv(r, parse_range(a), parse_range(p));
    }, py::arg("r"), py::arg("a"), py::arg("p"));

    m.attr("__version__") = std::string(kToolVersion.substr(kToolVersion.find(' ') + 1));
}
