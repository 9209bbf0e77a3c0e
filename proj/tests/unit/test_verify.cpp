#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "momentlab/error.hpp"
#include "momentlab/verify.hpp"

using namespace momentlab;
using nlohmann::json;

namespace {

std::string fixture(const char* name) { return std::string(MOMENTLAB_DATA_DIR) + "/" + name; }

std::string without_metadata(const std::string& report)
{
    json j = json::parse(report);
    j.erase("metadata");
    return j.dump();
}

} // namespace

TEST(ClassifyDelta, Cases)
{
    EXPECT_EQ(classify_delta(0.0, 0.0), Outcome::Holds);
    EXPECT_EQ(classify_delta(-1e-12, 1e-11), Outcome::Holds);
    EXPECT_EQ(classify_delta(-1.0, 0.5), Outcome::Fails);
    EXPECT_EQ(classify_delta(-INFINITY, 0.0), Outcome::Fails);
    EXPECT_EQ(classify_delta(NAN, 0.0), Outcome::Inconclusive);
    EXPECT_EQ(classify_delta(1.0, INFINITY), Outcome::Inconclusive);
}

TEST(Verify, CounterexampleReport)
{
    const auto run = run_verify(load_model_file(fixture("counterexample_r3.json")), {});
    ASSERT_EQ(run.records.size(), 1u);
    EXPECT_EQ(run.records[0].outcome, Outcome::Fails);
    EXPECT_EQ(run.records[0].expected, Expectation::Fails);
    EXPECT_TRUE(run.all_as_expected);
    const json j = json::parse(run.report_json);
    const auto& rec = j["records"][0];
    EXPECT_EQ(rec["verdict"], "fails");
    EXPECT_EQ(rec["regime"], "failure");
    EXPECT_EQ(rec["delta"]["method"], "exact");
    EXPECT_EQ(rec["positivity"]["verdict"], "certified");
    EXPECT_EQ(rec["counterexample"]["rational"]["delta"], "-13528549/65536");
    EXPECT_EQ(j["tool_version"], std::string(kToolVersion));
    EXPECT_EQ(j["model_digest"].get<std::string>().size(), 64u);
}

TEST(Verify, CauchyAllHold)
{
    VerifyOptions opts;
    opts.r = {0.5, 1.0, 1.5, 2.0};
    const auto run = run_verify(load_model_file(fixture("cauchy_n4.json")), opts);
    ASSERT_EQ(run.records.size(), 4u);
    for (const auto& rec : run.records)
        EXPECT_EQ(rec.outcome, Outcome::Holds);
    EXPECT_TRUE(run.all_as_expected);
    const json j = json::parse(run.report_json);
    EXPECT_EQ(j["records"][1]["channels"].size(), 3u);
    EXPECT_FALSE(j["records"][3].contains("channels"));
}

TEST(Verify, DefaultGridAndUnexpected)
{
    const auto f = parse_model_file(
        R"({"kind": "general-discrete", "params": {"atoms": [-1, 1], "weights": [[0, 0.5], [0.5, 0]]}})");
    const auto run = run_verify(f, {});
    ASSERT_EQ(run.records.size(), kDefaultRGrid.size());
    for (const auto& rec : run.records) {
        EXPECT_EQ(rec.expected, Expectation::Any);
        EXPECT_EQ(rec.outcome, Outcome::Fails);
    }
    EXPECT_TRUE(run.all_as_expected);
}

TEST(Verify, NegativeRemarkFails)
{
    const auto run = run_verify(load_model_file(fixture("uniform_remark.json")), {});
    for (const auto& rec : run.records) {
        EXPECT_EQ(rec.outcome, Outcome::Fails);
        EXPECT_TRUE(rec.as_expected);
    }
    const json j = json::parse(run.report_json);
    EXPECT_EQ(j["records"][2]["e_minus"]["value"], "+inf");
}

TEST(Verify, ReportsAreReproducible)
{
    const auto f = load_model_file(fixture("counterexample_r3.json"));
    VerifyOptions opts;
    opts.method = Method::MonteCarlo;
    opts.mc_n = 20000;
    opts.seed = 4;
    const auto a = run_verify(f, opts);
    opts.workers = 3;
    const auto b = run_verify(f, opts);
    EXPECT_EQ(without_metadata(a.report_json), without_metadata(b.report_json));
    EXPECT_EQ(json::parse(a.report_json)["records"][0]["delta"]["seed"], 4);
}

TEST(Verify, ExactOnDensityIsAnError)
{
    VerifyOptions opts;
    opts.method = Method::Exact;
    EXPECT_THROW(run_verify(load_model_file(fixture("uniform_remark.json")), opts), InvalidArgument);
}

TEST(RepresentationCsv, GapShrinks)
{
    const std::vector<std::int64_t> ns{10, 100, 1000};
    const auto csv = representation_csv(load_model_file(fixture("cauchy_n4.json")), 1.0, ns);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,channel_a,channel_b,exact_delta,gap");
    double prev = INFINITY;
    int rows = 0;
    while (std::getline(in, line)) {
        const double gap = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_LT(gap, prev);
        prev = gap;
        ++rows;
    }
    EXPECT_EQ(rows, 3);
    EXPECT_THROW(representation_csv(load_model_file(fixture("cauchy_n4.json")), 2.0, ns), RegimeError);
    EXPECT_THROW(representation_csv(load_model_file(fixture("uniform_remark.json")), 1.0, ns), RegimeError);
}

TEST(SweepCsv, FindsAndMisses)
{
    const auto hit = sweep_csv(3.0, parse_range("32:96:3"), parse_range("0:0.01171875:5"));
    EXPECT_NE(hit.find("64,0.005859375,"), std::string::npos) << hit;
    EXPECT_EQ(sweep_csv(1.0, parse_range("-10:10:21"), parse_range("0:1:11")), "a,p,delta\n");
}

TEST(GridRange, Parse)
{
    const auto g = parse_range("1:2:3");
    EXPECT_EQ(g.points(), (std::vector<double>{1.0, 1.5, 2.0}));
    EXPECT_EQ(parse_range("5:5:1").points(), (std::vector<double>{5.0}));
    EXPECT_THROW(parse_range("1:2:0"), InvalidArgument);
    EXPECT_THROW(parse_range("1:2"), InvalidArgument);
    EXPECT_THROW(parse_range("2:1:3"), InvalidArgument);
    EXPECT_THROW(parse_range("a:1:3"), InvalidArgument);
}

TEST(FormatNumber, ShortestRoundTrip)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-206.4292755126953), "-206.4292755126953");
    EXPECT_EQ(format_number(64.0), "64");
}
