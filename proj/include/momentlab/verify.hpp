#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momentlab/model_file.hpp"
#include "momentlab/moments.hpp"

namespace momentlab {

inline constexpr std::string_view kToolVersion = "momentlab 0.1.0";

// Used when neither the command line nor the file gives r values.
inline const std::vector<double> kDefaultRGrid = {0.25, 0.5, 1.0, 1.5, 1.9, 2.0};

enum class Outcome { Holds, Fails, Inconclusive };
std::string_view to_string(Outcome outcome);

// holds iff delta >= -bound, fails iff delta < -bound, inconclusive when
// either is NaN or the bound is infinite.
Outcome classify_delta(double delta, double bound);

enum class Expectation { Holds, Fails, Any };
std::string_view to_string(Expectation expectation);

// Flags override the file's options, which override the defaults.
struct VerifyOptions {
    std::vector<double> r;
    std::optional<Method> method;
    std::optional<std::int64_t> mc_n;
    std::optional<std::uint64_t> seed;
    std::optional<double> rel_tol;
    unsigned workers = 1;
};

struct RecordSummary {
    double r;
    Outcome outcome;
    Expectation expected;
    bool as_expected;
};

struct VerificationRun {
    // Sorted keys, two-space indent; everything outside "metadata" is
    // reproducible byte for byte.
    std::string report_json;
    std::vector<RecordSummary> records;
    bool all_as_expected = true;
};

VerificationRun run_verify(const ModelFile& file, const VerifyOptions& options);

// Columns n,channel_a,channel_b,exact_delta,gap.
std::string representation_csv(const ModelFile& file, double r, std::span<const std::int64_t> n_list);

struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t steps = 1;

    // `steps` evenly spaced points from lo to hi inclusive.
    std::vector<double> points() const;
};

// "lo:hi:steps" with steps >= 1; throws InvalidArgument otherwise.
GridRange parse_range(std::string_view text);

// Columns a,p,delta for the negative lattice points, most negative first.
std::string sweep_csv(double r, const GridRange& a, const GridRange& p);

// Shortest round-trip decimal form, locale independent.
std::string format_number(double x);

} // namespace momentlab
