#include <random>
#include <string>

#include <gtest/gtest.h>

#include "momentlab/error.hpp"
#include "momentlab/model_file.hpp"

using namespace momentlab;

namespace {

std::string fixture(const char* name) { return std::string(MOMENTLAB_DATA_DIR) + "/" + name; }

} // namespace

TEST(ModelFile, BundledCounterexample)
{
    const auto f = load_model_file(fixture("counterexample_r3.json"));
    EXPECT_EQ(f.kind, ModelKind::TwoPoint);
    EXPECT_EQ(std::get<TwoPointParams>(f.params).r, 3.0);
    const auto m = std::get<DiscreteJoint>(materialize(f));
    EXPECT_EQ(m.atoms()[0], 64.0);
}

TEST(ModelFile, MissingFieldPath)
{
    try {
        parse_model_file(R"({"kind": "cauchy-discrete", "params": {"atoms": [1], "d": [1]}})");
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), ".params.c");
    }
}

TEST(ModelFile, CauchyDensityExpressions)
{
    const auto f = parse_model_file(R"({"kind": "cauchy-density",
        "params": {"c": "x", "d": "1", "domain": [[1, 2]]}})");
    const auto& p = std::get<CauchyDensityParams>(f.params);
    EXPECT_EQ(p.c.eval(1.5), 1.5);
    EXPECT_EQ(p.d.eval(1.5), 1.0);
    ASSERT_EQ(p.domain.size(), 1u);
    EXPECT_EQ(p.domain[0].lo, 1.0);
    EXPECT_EQ(p.domain[0].hi, 2.0);
}

TEST(ModelFile, AllKindsParse)
{
    const char* docs[] = {
        R"({"kind": "cauchy-discrete", "params": {"atoms": [1, 2], "c": [1, 2], "d": [1, 1], "normalize": true}})",
        R"({"kind": "general-discrete", "params": {"atoms": [0, 1], "weights": [[0.25, 0.25], [0.25, 0.25]]}})",
        R"j({"kind": "cauchy-density", "params": {"c": "1+x^2", "d": "exp(-x)", "domain": [[0, 1], [2, 3]]}})j",
        R"({"kind": "product-density", "params": {"pieces": [{"lo": 0, "hi": 2, "density": 0.5}]}})",
        R"({"kind": "mixture-density", "params": {"components": [{"center": 0, "halfwidth": 1, "mass": 1}]}})",
        R"({"kind": "two-point", "params": {"r": 4}})",
        R"({"kind": "smoothed", "params": {"r": 3, "epsilon": 0.1}})",
        R"({"kind": "uniform-remark", "params": {}, "r": [-0.5], "options": {"method": "quadrature"}})",
    };
    int k = 0;
    for (const char* doc : docs) {
        const auto f = parse_model_file(doc);
        EXPECT_EQ(static_cast<int>(f.kind), k++);
        EXPECT_NO_THROW(materialize(f)) << doc;
    }
}

TEST(ModelFile, OptionsAndR)
{
    const auto f = parse_model_file(R"({"kind": "two-point", "params": {"r": 3}, "r": [3, 2.5],
        "options": {"method": "mc", "rel_tol": 1e-9, "mc_n": 5000, "seed": 12, "representation_n": [10, 100]}})");
    EXPECT_EQ(f.r, (std::vector<double>{3.0, 2.5}));
    EXPECT_EQ(f.options.method, Method::MonteCarlo);
    EXPECT_EQ(f.options.rel_tol, 1e-9);
    EXPECT_EQ(f.options.mc_n, 5000);
    EXPECT_EQ(f.options.seed, 12u);
    EXPECT_EQ(f.options.representation_n, (std::vector<std::int64_t>{10, 100}));
}

TEST(ModelFile, StrictSchema)
{
    const std::pair<const char*, const char*> cases[] = {
        {R"({"kind": "two-point", "params": {"r": 3}, "extra": 1})", ".extra"},
        {R"({"kind": "two-point", "params": {"r": 3, "A": 64}})", ".params.A"},
        {R"({"kind": "two-point", "params": {"r": "3"}})", ".params.r"},
        {R"({"kind": "three-point", "params": {}})", ".kind"},
        {R"({"params": {}})", ".kind"},
        {R"({"kind": "two-point"})", ".params"},
        {R"({"kind": "general-discrete", "params": {"atoms": [0, 1], "weights": [[1, 0]]}})", ".params.weights"},
        {R"({"kind": "general-discrete", "params": {"atoms": [0, 1], "weights": [[1, 0], [0]]}})",
         ".params.weights[1]"},
        {R"({"kind": "mixture-density", "params": {"components": [{"center": 0, "mass": 1}]}})",
         ".params.components[0].halfwidth"},
        {R"({"kind": "cauchy-density", "params": {"c": "x", "d": "1", "domain": [[1, 2, 3]]}})",
         ".params.domain[0]"},
        {R"({"kind": "uniform-remark", "params": {}, "options": {"method": "guess"}})", ".options.method"},
        {R"({"kind": "uniform-remark", "params": {}, "options": {"seed": -1}})", ".options.seed"},
        {R"({"kind": "uniform-remark", "params": {}, "r": [1, true]})", ".r[1]"},
        {R"([1, 2])", "."},
        {R"({"kind": )", "."},
    };
    for (const auto& [doc, path] : cases) {
        try {
            parse_model_file(doc);
            ADD_FAILURE() << "accepted " << doc;
        } catch (const SchemaError& e) {
            EXPECT_EQ(e.path(), path) << doc << " -> " << e.what();
        }
    }
}

TEST(ModelFile, ExpressionErrorsCarryField)
{
    try {
        parse_model_file(R"({"kind": "cauchy-density", "params": {"c": "1+*x", "d": "1", "domain": [[1, 2]]}})");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.field(), ".params.c");
        EXPECT_EQ(e.position(), 3u);
    }
}

TEST(ModelFile, DigestTracksCanonicalContent)
{
    const auto a = parse_model_file(R"({"kind": "two-point", "params": {"r": 3}})");
    const auto b = parse_model_file("{ \"params\" : { \"r\" : 3 },\n  \"kind\" : \"two-point\" }");
    const auto c = parse_model_file(R"({"kind": "two-point", "params": {"r": 4}})");
    EXPECT_EQ(model_digest(a), model_digest(b));
    EXPECT_NE(model_digest(a), model_digest(c));
    EXPECT_EQ(model_digest(a).size(), 64u);
}

TEST(ModelFile, FuzzNeverAborts)
{
    std::mt19937_64 rng(5);
    const std::string seedtext = R"({"kind": "cauchy-density", "params": {"c": "x", "d": "1", "domain": [[1, 2]]}})";
    for (int i = 0; i < 3000; ++i) {
        std::string s = seedtext;
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e)
            s[rng() % s.size()] = static_cast<char>(rng() % 256);
        try {
            const auto f = parse_model_file(s);
            (void)model_digest(f);
        } catch (const SchemaError&) {
        } catch (const SyntaxError&) {
        }
    }
}
