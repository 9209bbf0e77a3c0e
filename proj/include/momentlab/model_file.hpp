#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "momentlab/expr.hpp"
#include "momentlab/model.hpp"
#include "momentlab/moments.hpp"

namespace momentlab {

enum class ModelKind {
    CauchyDiscrete,
    GeneralDiscrete,
    CauchyDensity,
    ProductDensity,
    MixtureDensity,
    TwoPoint,
    Smoothed,
    UniformRemark,
};

std::string_view to_string(ModelKind kind);
// Throws SchemaError at path `.kind` for an unknown tag.
ModelKind parse_kind(std::string_view tag);

struct CauchyDiscreteParams {
    std::vector<double> atoms;
    std::vector<double> c;
    std::vector<double> d;
    bool normalize = false;
};

struct GeneralDiscreteParams {
    std::vector<double> atoms;
    Eigen::MatrixXd weights;
};

struct CauchyDensityParams {
    Expr c;
    Expr d;
    std::vector<Interval> domain;
};

struct ProductDensityParams {
    std::vector<PiecewisePiece> pieces;
};

struct MixtureDensityParams {
    std::vector<UniformComponent> components;
};

struct TwoPointParams {
    double r = 0.0;
};

struct SmoothedParams {
    double r = 0.0;
    double epsilon = 0.0;
};

struct UniformRemarkParams {};

using ModelParams = std::variant<CauchyDiscreteParams, GeneralDiscreteParams, CauchyDensityParams,
                                 ProductDensityParams, MixtureDensityParams, TwoPointParams, SmoothedParams,
                                 UniformRemarkParams>;

struct ModelOptions {
    std::optional<Method> method;
    std::optional<double> rel_tol;
    std::optional<std::int64_t> mc_n;
    std::optional<std::uint64_t> seed;
    // Truncation indices for the representation cross-check in verify.
    std::vector<std::int64_t> representation_n;
};

struct ModelFile {
    ModelKind kind = ModelKind::UniformRemark;
    ModelParams params;
    std::vector<double> r;
    ModelOptions options;
    // Sorted-key compact JSON of the whole document.
    std::string canonical;
};

ModelFile parse_model_file(std::string_view document);
ModelFile load_model_file(const std::string& path);

Model materialize(const ModelFile& file);

// Hex SHA-256 of the canonical form.
std::string model_digest(const ModelFile& file);

} // namespace momentlab
