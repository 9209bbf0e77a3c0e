#include "momentlab/verify.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "momentlab/counterexample.hpp"
#include "momentlab/error.hpp"
#include "momentlab/positivity.hpp"
#include "momentlab/representation.hpp"

namespace momentlab {

namespace {

using nlohmann::json;

constexpr double kDefaultRelTol = 1e-8;
constexpr std::int64_t kDefaultMcSamples = 1'000'000;

// JSON has no infinities; they are written as strings.
json number_json(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "+inf" : "-inf";
    return x;
}

json estimate_json(const MomentEstimate& e)
{
    json out = {
        {"value", number_json(e.value)},
        {"abs_error_bound", number_json(e.abs_error_bound)},
        {"method", std::string(to_string(e.method))},
        {"n", e.n},
    };
    if (e.seed)
        out["seed"] = *e.seed;
    if (e.heuristic_bound)
        out["heuristic_bound"] = true;
    return out;
}

json positivity_json(const PositivityReport& p)
{
    json out = {
        {"verdict", std::string(to_string(p.verdict))},
        {"min_value", number_json(p.min_value)},
        {"method", p.method},
        {"witness", p.witness ? json(*p.witness) : json(nullptr)},
    };
    if (!p.witness_description.empty())
        out["witness_description"] = p.witness_description;
    if (p.truncated)
        out["truncated"] = true;
    if (p.seed)
        out["seed"] = *p.seed;
    return out;
}

json breakdown_json(const DeltaBreakdown& b)
{
    const auto values = [](const BreakdownValues& v) {
        return json{
            {"e_plus", v.e_plus},
            {"e_minus", v.e_minus},
            {"delta", v.delta},
            {"jensen_lhs", v.jensen_lhs},
            {"jensen_rhs", v.jensen_rhs},
            {"jensen_gap", v.jensen_gap},
            {"jensen_substituted", v.jensen_substituted},
            {"chain_bound", v.chain_bound},
        };
    };
    json out = {{"exact", b.exact}, {"values", values(b.values)}, {"floating", values(b.floating)}};
    if (b.rational) {
        out["rational"] = {
            {"e_plus", b.rational->e_plus},         {"e_minus", b.rational->e_minus},
            {"delta", b.rational->delta},           {"jensen_lhs", b.rational->jensen_lhs},
            {"jensen_rhs", b.rational->jensen_rhs}, {"chain_bound", b.rational->chain_bound},
        };
    }
    return out;
}

PositivityReport positivity_of(const Model& model)
{
    if (const auto* d = std::get_if<DiscreteJoint>(&model))
        return check_psd_discrete(*d);
    return probe_density_positivity(std::get<DensityModel>(model), std::span<const Probe>{});
}

std::optional<double> law_exponent(const ModelFile& file)
{
    if (const auto* p = std::get_if<TwoPointParams>(&file.params))
        return p->r;
    if (const auto* p = std::get_if<SmoothedParams>(&file.params))
        return p->r;
    return std::nullopt;
}

Expectation expectation_for(const ModelFile& file, const PositivityReport& positivity, double r)
{
    if (positivity.verdict == Verdict::Falsified)
        return Expectation::Any;
    if (const auto law_r = law_exponent(file); law_r && *law_r == r)
        return Expectation::Fails;
    if (file.kind == ModelKind::UniformRemark && r < 0.0)
        return Expectation::Fails;
    if (r > 0.0 && r <= 2.0)
        return Expectation::Holds;
    return Expectation::Any;
}

bool matches(Outcome outcome, Expectation expected)
{
    switch (expected) {
    case Expectation::Holds:
        return outcome == Outcome::Holds;
    case Expectation::Fails:
        return outcome == Outcome::Fails;
    case Expectation::Any:
        return true;
    }
    return false;
}

std::vector<double> r_grid(const ModelFile& file, const VerifyOptions& options)
{
    if (!options.r.empty())
        return options.r;
    if (!file.r.empty())
        return file.r;
    if (const auto law_r = law_exponent(file))
        return {*law_r};
    return kDefaultRGrid;
}

Method default_method(const Model& model)
{
    return std::holds_alternative<DiscreteJoint>(model) ? Method::Exact : Method::Quadrature;
}

} // namespace

std::string_view to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::Holds:
        return "holds";
    case Outcome::Fails:
        return "fails";
    case Outcome::Inconclusive:
        return "inconclusive";
    }
    return "?";
}

std::string_view to_string(Expectation expectation)
{
    switch (expectation) {
    case Expectation::Holds:
        return "holds";
    case Expectation::Fails:
        return "fails";
    case Expectation::Any:
        return "any";
    }
    return "?";
}

Outcome classify_delta(double delta, double bound)
{
    if (std::isnan(delta) || std::isnan(bound) || std::isinf(bound))
        return Outcome::Inconclusive;
    return delta >= -bound ? Outcome::Holds : Outcome::Fails;
}

VerificationRun run_verify(const ModelFile& file, const VerifyOptions& options)
{
    using clock = std::chrono::steady_clock;
    const auto run_start = clock::now();

    const Model model = materialize(file);
    const PositivityReport positivity = positivity_of(model);

    DeltaOptions delta_options;
    delta_options.method = options.method.value_or(file.options.method.value_or(default_method(model)));
    delta_options.rel_tol = options.rel_tol.value_or(file.options.rel_tol.value_or(kDefaultRelTol));
    delta_options.mc_samples = options.mc_n.value_or(file.options.mc_n.value_or(kDefaultMcSamples));
    delta_options.seed = options.seed.value_or(file.options.seed.value_or(0));
    delta_options.workers = options.workers;

    VerificationRun run;
    json records = json::array();
    json timings = json::array();
    for (double rv : r_grid(file, options)) {
        const auto start = clock::now();
        const RExponent r(rv);
        const MomentPair pair = moment_pair(model, r, delta_options);
        const Outcome outcome = classify_delta(pair.delta.value, pair.delta.abs_error_bound);
        const Expectation expected = expectation_for(file, positivity, rv);
        const bool ok = matches(outcome, expected);

        json rec = {
            {"r", rv},
            {"regime", std::string(to_string(r.regime()))},
            {"positivity", positivity_json(positivity)},
            {"e_plus", estimate_json(pair.plus)},
            {"e_minus", estimate_json(pair.minus)},
            {"delta", estimate_json(pair.delta)},
            {"verdict", std::string(to_string(outcome))},
            {"expected", std::string(to_string(expected))},
            {"as_expected", ok},
        };

        if (file.kind == ModelKind::TwoPoint && rv > 2.0 && law_exponent(file) == rv)
            rec["counterexample"] = breakdown_json(delta_exact(build_counterexample(r)));

        const auto* discrete = std::get_if<DiscreteJoint>(&model);
        if (discrete && !file.options.representation_n.empty() && rv >= kRepresentationMinR && rv < 2.0) {
            json channels = json::array();
            for (std::int64_t n : file.options.representation_n) {
                const TruncatedDelta t = truncated_delta_channels(*discrete, r, TruncationWindow::from_n(n),
                                                                  delta_options.rel_tol);
                channels.push_back({{"n", n},
                                    {"channel_a", t.integral_channel},
                                    {"channel_b", t.expectation_channel},
                                    {"tolerance", t.tolerance},
                                    {"method", "truncated-representation"}});
            }
            rec["channels"] = channels;
        }

        records.push_back(std::move(rec));
        timings.push_back(
            {{"r", rv}, {"wall_time_s", std::chrono::duration<double>(clock::now() - start).count()}});
        run.records.push_back({rv, outcome, expected, ok});
        run.all_as_expected = run.all_as_expected && ok;
    }

    json report = {
        {"tool_version", std::string(kToolVersion)},
        {"model_digest", model_digest(file)},
        {"kind", std::string(to_string(file.kind))},
        {"records", records},
        {"all_as_expected", run.all_as_expected},
        {"metadata",
         {{"records", timings},
          {"wall_time_s", std::chrono::duration<double>(clock::now() - run_start).count()}}},
    };
    run.report_json = report.dump(2) + "\n";
    return run;
}

std::string format_number(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string representation_csv(const ModelFile& file, double r, std::span<const std::int64_t> n_list)
{
    const RExponent exponent(r);
    if (!(r > 0.0 && r < 2.0))
        throw RegimeError("the representation table needs 0 < r < 2, got r = " + format_number(r));
    const Model model = materialize(file);
    const auto* discrete = std::get_if<DiscreteJoint>(&model);
    if (!discrete)
        throw RegimeError("the representation table needs a discrete model, got kind " +
                          std::string(to_string(file.kind)));
    const double rel_tol = file.options.rel_tol.value_or(kDefaultRelTol);
    DeltaOptions exact;
    exact.method = Method::Exact;
    const double exact_delta = delta(model, exponent, exact).value;

    std::ostringstream out;
    out << "n,channel_a,channel_b,exact_delta,gap\n";
    for (std::int64_t n : n_list) {
        const TruncatedDelta t = truncated_delta_channels(*discrete, exponent, TruncationWindow::from_n(n), rel_tol);
        out << n << ',' << format_number(t.integral_channel) << ',' << format_number(t.expectation_channel) << ','
            << format_number(exact_delta) << ',' << format_number(std::fabs(exact_delta - t.expectation_channel))
            << '\n';
    }
    return out.str();
}

std::vector<double> GridRange::points() const
{
    std::vector<double> out;
    if (steps == 1) {
        out.push_back(lo);
        return out;
    }
    for (std::int64_t k = 0; k < steps; ++k)
        out.push_back(k + 1 == steps ? hi
                                     : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1));
    return out;
}

GridRange parse_range(std::string_view text)
{
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos)
        throw InvalidArgument("range must look like lo:hi:steps, got '" + std::string(text) + "'");
    GridRange g;
    const auto parse = [&](std::string_view part, auto& value) {
        const auto res = std::from_chars(part.data(), part.data() + part.size(), value);
        if (res.ec != std::errc() || res.ptr != part.data() + part.size())
            throw InvalidArgument("bad number '" + std::string(part) + "' in range '" + std::string(text) + "'");
    };
    parse(text.substr(0, first), g.lo);
    parse(text.substr(first + 1, second - first - 1), g.hi);
    parse(text.substr(second + 1), g.steps);
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.lo > g.hi)
        throw InvalidArgument("range needs finite lo <= hi, got '" + std::string(text) + "'");
    if (g.steps < 1)
        throw InvalidArgument("range needs at least one step, got '" + std::string(text) + "'");
    return g;
}

std::string sweep_csv(double r, const GridRange& a, const GridRange& p)
{
    if (!(r > 0.0))
        throw InvalidArgument("sweep needs r > 0, got r = " + format_number(r));
    const RExponent exponent(r);
    const auto a_points = a.points();
    const auto p_points = p.points();
    std::ostringstream out;
    out << "a,p,delta\n";
    for (const auto& hit : search_two_point(exponent, a_points, p_points))
        out << format_number(hit.a) << ',' << format_number(hit.p) << ',' << format_number(hit.delta) << '\n';
    return out.str();
}

} // namespace momentlab
