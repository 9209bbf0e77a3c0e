// momentlab command-line front end: verify, representation, sweep.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "momentlab/error.hpp"
#include "momentlab/model_file.hpp"
#include "momentlab/verify.hpp"

namespace {

constexpr int kExitUnexpected = 1;
constexpr int kExitError = 2;

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what)
{
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        T value{};
        const char* first = text.data() + start;
        const char* last = text.data() + end;
        const auto res = std::from_chars(first, last, value);
        if (first == last || res.ec != std::errc() || res.ptr != last)
            throw momentlab::InvalidArgument(std::string("bad ") + what + " list '" + text + "'");
        out.push_back(value);
        start = end + 1;
    }
    return out;
}

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw momentlab::Error("cannot write '" + out_path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical lab for E|X+Y|^r >= E|X-Y|^r"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(momentlab::kToolVersion));

    std::string file;
    std::string r_text;
    std::string method_text;
    std::int64_t mc_n = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out_path;

    auto* verify = app.add_subcommand("verify", "Run positivity and moment checks over an r grid; writes a JSON report");
    verify->add_option("file", file, "Model file (JSON)")->required();
    verify->add_option("--r", r_text, "Comma-separated r values");
    verify->add_option("--method", method_text, "exact, quadrature or mc")
        ->check(CLI::IsMember({"exact", "quadrature", "mc", "monte-carlo"}));
    auto* mc_opt = verify->add_option("--mc-n", mc_n, "Monte Carlo sample count")->check(CLI::PositiveNumber);
    auto* seed_opt = verify->add_option("--seed", seed, "Monte Carlo seed");
    verify->add_option("--workers", workers, "Monte Carlo worker threads")->check(CLI::Range(1u, 256u));
    verify->add_option("--out", out_path, "Report path (default: standard output)");

    std::string rep_file;
    double rep_r = 0.0;
    std::string n_text;
    std::string rep_out;
    auto* representation =
        app.add_subcommand("representation", "Truncated-representation convergence table as CSV");
    representation->add_option("file", rep_file, "Model file (JSON)")->required();
    representation->add_option("--r", rep_r, "Exponent, 0 < r < 2")->required();
    representation->add_option("--n", n_text, "Comma-separated truncation indices")->required();
    representation->add_option("--out", rep_out, "CSV path (default: standard output)");

    double sweep_r = 0.0;
    std::string a_text;
    std::string p_text;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Search two-point laws on (a, -1) for negative Delta; CSV");
    sweep->add_option("--r", sweep_r, "Exponent")->required();
    sweep->add_option("--a", a_text, "lo:hi:steps for the atom a")->required();
    sweep->add_option("--p", p_text, "lo:hi:steps for P(X = a)")->required();
    sweep->add_option("--out", sweep_out, "CSV path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*verify) {
            momentlab::VerifyOptions options;
            if (!r_text.empty())
                options.r = parse_list<double>(r_text, "r");
            if (!method_text.empty())
                options.method = momentlab::parse_method(method_text);
            if (*mc_opt)
                options.mc_n = mc_n;
            if (*seed_opt)
                options.seed = seed;
            options.workers = workers;
            const auto model_file = momentlab::load_model_file(file);
            const auto run = momentlab::run_verify(model_file, options);
            emit(run.report_json, out_path);
            for (const auto& rec : run.records) {
                std::cerr << "r=" << momentlab::format_number(rec.r) << " " << momentlab::to_string(rec.outcome)
                          << " (expected " << momentlab::to_string(rec.expected) << ")"
                          << (rec.as_expected ? "" : " UNEXPECTED") << "\n";
            }
            return run.all_as_expected ? 0 : kExitUnexpected;
        }
        if (*representation) {
            const auto n_list = parse_list<std::int64_t>(n_text, "n");
            const auto model_file = momentlab::load_model_file(rep_file);
            emit(momentlab::representation_csv(model_file, rep_r, n_list), rep_out);
            return 0;
        }
        if (*sweep) {
            const auto a = momentlab::parse_range(a_text);
            const auto p = momentlab::parse_range(p_text);
            emit(momentlab::sweep_csv(sweep_r, a, p), sweep_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
