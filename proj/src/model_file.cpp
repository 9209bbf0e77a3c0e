#include "momentlab/model_file.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "momentlab/error.hpp"

namespace momentlab {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 8> kKindTags = {
    "cauchy-discrete", "general-discrete", "cauchy-density", "product-density",
    "mixture-density", "two-point",        "smoothed",       "uniform-remark",
};

std::string child_path(const std::string& parent, std::string_view key) { return parent + "." + std::string(key); }

std::string index_path(const std::string& parent, std::size_t i)
{
    return parent + "[" + std::to_string(i) + "]";
}

const char* type_name(const json& v)
{
    return v.type_name();
}

void require_object(const json& v, const std::string& path)
{
    if (!v.is_object())
        throw SchemaError(path, std::string("expected an object, got ") + type_name(v));
}

void allow_fields(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed)
            known = known || key == a;
        if (!known)
            throw SchemaError(child_path(path, key), "unknown field");
    }
}

const json& field(const json& obj, const std::string& path, std::string_view key)
{
    auto it = obj.find(std::string(key));
    if (it == obj.end())
        throw SchemaError(child_path(path, key), "missing field");
    return *it;
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw SchemaError(path, std::string("expected a number, got ") + type_name(v));
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw SchemaError(path, "number is not finite");
    return x;
}

std::int64_t integer(const json& v, const std::string& path)
{
    if (v.is_number_integer())
        return v.get<std::int64_t>();
    throw SchemaError(path, std::string("expected an integer, got ") + type_name(v));
}

std::string text(const json& v, const std::string& path)
{
    if (!v.is_string())
        throw SchemaError(path, std::string("expected a string, got ") + type_name(v));
    return v.get<std::string>();
}

const json& array(const json& v, const std::string& path)
{
    if (!v.is_array())
        throw SchemaError(path, std::string("expected an array, got ") + type_name(v));
    return v;
}

std::vector<double> numbers(const json& v, const std::string& path)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i)
        out.push_back(number(v[i], index_path(path, i)));
    return out;
}

Expr expression(const json& v, const std::string& path)
{
    const std::string s = text(v, path);
    try {
        return parse_expr(s, 'x');
    } catch (const SyntaxError& e) {
        throw SyntaxError(e.position(), e.expected(), path);
    }
}

CauchyDiscreteParams read_cauchy_discrete(const json& p, const std::string& path)
{
    allow_fields(p, path, {"atoms", "c", "d", "normalize"});
    CauchyDiscreteParams out;
    out.atoms = numbers(field(p, path, "atoms"), child_path(path, "atoms"));
    out.c = numbers(field(p, path, "c"), child_path(path, "c"));
    out.d = numbers(field(p, path, "d"), child_path(path, "d"));
    if (p.contains("normalize")) {
        const json& n = p["normalize"];
        if (!n.is_boolean())
            throw SchemaError(child_path(path, "normalize"), std::string("expected a boolean, got ") + type_name(n));
        out.normalize = n.get<bool>();
    }
    if (out.c.size() != out.atoms.size() || out.d.size() != out.atoms.size())
        throw SchemaError(path, "atoms, c and d must have the same length");
    return out;
}

GeneralDiscreteParams read_general_discrete(const json& p, const std::string& path)
{
    allow_fields(p, path, {"atoms", "weights"});
    GeneralDiscreteParams out;
    out.atoms = numbers(field(p, path, "atoms"), child_path(path, "atoms"));
    const std::string wpath = child_path(path, "weights");
    const json& rows = array(field(p, path, "weights"), wpath);
    const auto n = static_cast<Eigen::Index>(out.atoms.size());
    if (static_cast<Eigen::Index>(rows.size()) != n)
        throw SchemaError(wpath, "expected " + std::to_string(n) + " rows");
    out.weights.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string rpath = index_path(wpath, static_cast<std::size_t>(i));
        const auto row = numbers(rows[static_cast<std::size_t>(i)], rpath);
        if (static_cast<Eigen::Index>(row.size()) != n)
            throw SchemaError(rpath, "expected " + std::to_string(n) + " entries");
        for (Eigen::Index j = 0; j < n; ++j)
            out.weights(i, j) = row[static_cast<std::size_t>(j)];
    }
    return out;
}

CauchyDensityParams read_cauchy_density(const json& p, const std::string& path)
{
    allow_fields(p, path, {"c", "d", "domain"});
    CauchyDensityParams out{expression(field(p, path, "c"), child_path(path, "c")),
                            expression(field(p, path, "d"), child_path(path, "d")),
                            {}};
    const std::string dpath = child_path(path, "domain");
    const json& dom = array(field(p, path, "domain"), dpath);
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const std::string ipath = index_path(dpath, i);
        const auto ends = numbers(dom[i], ipath);
        if (ends.size() != 2)
            throw SchemaError(ipath, "expected [lo, hi]");
        out.domain.push_back({ends[0], ends[1]});
    }
    return out;
}

ProductDensityParams read_product_density(const json& p, const std::string& path)
{
    allow_fields(p, path, {"pieces"});
    ProductDensityParams out;
    const std::string ppath = child_path(path, "pieces");
    const json& pieces = array(field(p, path, "pieces"), ppath);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::string ipath = index_path(ppath, i);
        require_object(pieces[i], ipath);
        allow_fields(pieces[i], ipath, {"lo", "hi", "density"});
        out.pieces.push_back({number(field(pieces[i], ipath, "lo"), child_path(ipath, "lo")),
                              number(field(pieces[i], ipath, "hi"), child_path(ipath, "hi")),
                              number(field(pieces[i], ipath, "density"), child_path(ipath, "density"))});
    }
    return out;
}

MixtureDensityParams read_mixture_density(const json& p, const std::string& path)
{
    allow_fields(p, path, {"components"});
    MixtureDensityParams out;
    const std::string cpath = child_path(path, "components");
    const json& comps = array(field(p, path, "components"), cpath);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string ipath = index_path(cpath, i);
        require_object(comps[i], ipath);
        allow_fields(comps[i], ipath, {"center", "halfwidth", "mass"});
        out.components.push_back({number(field(comps[i], ipath, "center"), child_path(ipath, "center")),
                                  number(field(comps[i], ipath, "halfwidth"), child_path(ipath, "halfwidth")),
                                  number(field(comps[i], ipath, "mass"), child_path(ipath, "mass"))});
    }
    return out;
}

ModelOptions read_options(const json& o, const std::string& path)
{
    require_object(o, path);
    allow_fields(o, path, {"method", "rel_tol", "mc_n", "seed", "representation_n"});
    ModelOptions out;
    if (o.contains("method")) {
        const std::string mpath = child_path(path, "method");
        const std::string m = text(o["method"], mpath);
        try {
            out.method = parse_method(m);
        } catch (const Error&) {
            throw SchemaError(mpath, "unknown method '" + m + "'");
        }
    }
    if (o.contains("rel_tol")) {
        const double tol = number(o["rel_tol"], child_path(path, "rel_tol"));
        if (!(tol > 0.0))
            throw SchemaError(child_path(path, "rel_tol"), "must be positive");
        out.rel_tol = tol;
    }
    if (o.contains("mc_n")) {
        const auto n = integer(o["mc_n"], child_path(path, "mc_n"));
        if (n < 1)
            throw SchemaError(child_path(path, "mc_n"), "must be positive");
        out.mc_n = n;
    }
    if (o.contains("seed")) {
        const json& s = o["seed"];
        if (!s.is_number_unsigned())
            throw SchemaError(child_path(path, "seed"), "expected a non-negative integer");
        out.seed = s.get<std::uint64_t>();
    }
    if (o.contains("representation_n")) {
        const std::string npath = child_path(path, "representation_n");
        const json& ns = array(o["representation_n"], npath);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto n = integer(ns[i], index_path(npath, i));
            if (n < 2)
                throw SchemaError(index_path(npath, i), "truncation index must be at least 2");
            out.representation_n.push_back(n);
        }
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

std::string_view to_string(ModelKind kind) { return kKindTags[static_cast<std::size_t>(kind)]; }

ModelKind parse_kind(std::string_view tag)
{
    for (std::size_t i = 0; i < kKindTags.size(); ++i)
        if (kKindTags[i] == tag)
            return static_cast<ModelKind>(i);
    throw SchemaError(".kind", "unknown model kind '" + std::string(tag) + "'");
}

ModelFile parse_model_file(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::exception& e) {
        throw SchemaError(".", std::string("invalid JSON: ") + e.what());
    }
    try {
        require_object(doc, ".");
        allow_fields(doc, "", {"kind", "params", "r", "options"});

        ModelFile out;
        out.kind = parse_kind(text(field(doc, "", "kind"), ".kind"));
        const json& p = field(doc, "", "params");
        const std::string path = ".params";
        require_object(p, path);
        switch (out.kind) {
        case ModelKind::CauchyDiscrete:
            out.params = read_cauchy_discrete(p, path);
            break;
        case ModelKind::GeneralDiscrete:
            out.params = read_general_discrete(p, path);
            break;
        case ModelKind::CauchyDensity:
            out.params = read_cauchy_density(p, path);
            break;
        case ModelKind::ProductDensity:
            out.params = read_product_density(p, path);
            break;
        case ModelKind::MixtureDensity:
            out.params = read_mixture_density(p, path);
            break;
        case ModelKind::TwoPoint:
            allow_fields(p, path, {"r"});
            out.params = TwoPointParams{number(field(p, path, "r"), ".params.r")};
            break;
        case ModelKind::Smoothed:
            allow_fields(p, path, {"r", "epsilon"});
            out.params = SmoothedParams{number(field(p, path, "r"), ".params.r"),
                                        number(field(p, path, "epsilon"), ".params.epsilon")};
            break;
        case ModelKind::UniformRemark:
            allow_fields(p, path, {});
            out.params = UniformRemarkParams{};
            break;
        }
        if (doc.contains("r"))
            out.r = numbers(doc["r"], ".r");
        if (doc.contains("options"))
            out.options = read_options(doc["options"], ".options");
        out.canonical = doc.dump(-1, ' ', false, json::error_handler_t::replace);
        return out;
    } catch (const json::exception& e) {
        throw SchemaError(".", e.what());
    }
}

ModelFile load_model_file(const std::string& path) { return parse_model_file(read_file(path)); }

Model materialize(const ModelFile& file)
{
    return std::visit(
        [](const auto& p) -> Model {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, CauchyDiscreteParams>)
                return build_cauchy_discrete(p.atoms, p.c, p.d, p.normalize);
            else if constexpr (std::is_same_v<T, GeneralDiscreteParams>)
                return build_general_discrete(p.atoms, p.weights);
            else if constexpr (std::is_same_v<T, CauchyDensityParams>)
                return build_cauchy_density(p.c, p.d, p.domain);
            else if constexpr (std::is_same_v<T, ProductDensityParams>)
                return build_product_density(p.pieces);
            else if constexpr (std::is_same_v<T, MixtureDensityParams>)
                return build_mixture_density(p.components);
            else if constexpr (std::is_same_v<T, TwoPointParams>)
                return to_discrete(build_counterexample(RExponent(p.r)));
            else if constexpr (std::is_same_v<T, SmoothedParams>)
                return build_smoothed(build_counterexample(RExponent(p.r)), p.epsilon);
            else
                return build_uniform_remark();
        },
        file.params);
}

std::string model_digest(const ModelFile& file)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(file.canonical.data(), file.canonical.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

} // namespace momentlab
