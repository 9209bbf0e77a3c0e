#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "momentlab/error.hpp"
#include "momentlab/moments.hpp"
#include "momentlab/sampling.hpp"

namespace momentlab {

AliasTable::AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size())
{
    const std::size_t n = weights.size();
    if (n == 0)
        throw InvalidArgument("alias table needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw NegativeWeight("alias table weights must be non-negative and finite");
        total += w;
    }
    if (!(total > 0.0))
        throw InvalidArgument("alias table weights sum to zero");

    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::size_t i : large) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    // Leftovers from rounding.
    for (std::size_t i : small) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}

std::size_t AliasTable::sample(std::mt19937_64& rng) const
{
    const double u = uniform01(rng) * static_cast<double>(prob_.size());
    const auto column = std::min(static_cast<std::size_t>(u), prob_.size() - 1);
    return (u - static_cast<double>(column)) < prob_[column] ? column : alias_[column];
}

namespace {

constexpr std::int64_t kBatchSize = 1 << 16;

struct BatchStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    bool infinite = false;
    std::int64_t proposals = 0;
    std::int64_t accepted = 0;
};

// Joint sampler: writes one (x, y) draw and returns the number of proposals
// consumed (1 unless rejection is involved).
using PairSampler = std::function<std::int64_t(std::mt19937_64&, double&, double&)>;

constexpr std::int64_t kMaxProposalsPerDraw = 100000;

PairSampler make_discrete_sampler(const DiscreteJoint& model)
{
    const auto n = model.size();
    std::vector<double> flat(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            flat[i * n + j] = model.weights()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    auto table = std::make_shared<AliasTable>(flat);
    auto atoms = model.atoms();
    return [table, atoms, n](std::mt19937_64& rng, double& x, double& y) -> std::int64_t {
        const std::size_t k = table->sample(rng);
        x = atoms[k / n];
        y = atoms[k % n];
        return 1;
    };
}

PairSampler make_product_sampler(const ProductKernel& kernel)
{
    // Inverse CDF of the piecewise-constant marginal.
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& pc : kernel.marginal) {
        acc += pc.density * (pc.hi - pc.lo);
        cumulative.push_back(acc);
    }
    auto pieces = kernel.marginal;
    auto inverse_cdf = [pieces, cumulative](double u) {
        const double target = u * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), pieces.size() - 1);
        const double before = k == 0 ? 0.0 : cumulative[k - 1];
        const double x = pieces[k].lo + (target - before) / pieces[k].density;
        return std::clamp(x, pieces[k].lo, pieces[k].hi);
    };
    return [inverse_cdf](std::mt19937_64& rng, double& x, double& y) -> std::int64_t {
        x = inverse_cdf(uniform01(rng));
        y = inverse_cdf(uniform01(rng));
        return 1;
    };
}

PairSampler make_mixture_sampler(const MixtureUniform& mix)
{
    const auto n = mix.components.size();
    std::vector<double> flat(n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            flat[k * n + l] = mix.joint(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    auto table = std::make_shared<AliasTable>(flat);
    auto comps = mix.components;
    return [table, comps, n](std::mt19937_64& rng, double& x, double& y) -> std::int64_t {
        const std::size_t k = table->sample(rng);
        const auto& cx = comps[k / n];
        const auto& cy = comps[k % n];
        x = cx.center + cx.halfwidth * (2.0 * uniform01(rng) - 1.0);
        y = cy.center + cy.halfwidth * (2.0 * uniform01(rng) - 1.0);
        return 1;
    };
}

// Proposal x, y iid with density proportional to d on D (itself by rejection
// from the uniform law on D), accepted with probability 2 c_min / (c(x) + c(y)).
PairSampler make_cauchy_sampler(const DensityModel& model, const CauchyKernel& kernel)
{
    constexpr int kGrid = 4096;
    double d_max = 0.0;
    double c_min = std::numeric_limits<double>::infinity();
    double total_length = 0.0;
    for (const Interval& iv : model.domain()) {
        total_length += iv.length();
        for (int k = 0; k <= kGrid; ++k) {
            const double x = iv.lo + iv.length() * k / kGrid;
            d_max = std::max(d_max, kernel.d.eval(x));
            c_min = std::min(c_min, kernel.c.eval(x));
        }
    }
    // Grid extrema are not guaranteed bounds; widen them and verify on use.
    d_max *= 1.05;
    c_min *= 0.95;
    auto domain = model.domain();
    auto uniform_on_domain = [domain, total_length](std::mt19937_64& rng) {
        double u = uniform01(rng) * total_length;
        for (const Interval& iv : domain) {
            if (u <= iv.length())
                return iv.lo + u;
            u -= iv.length();
        }
        return domain.back().hi;
    };
    auto draw_d = [uniform_on_domain, kernel, d_max](std::mt19937_64& rng, std::int64_t& proposals) {
        for (;;) {
            const double x = uniform_on_domain(rng);
            const double dx = kernel.d.eval(x);
            if (dx > d_max)
                throw InvariantViolation("rejection envelope for d(x) is violated at x = " + std::to_string(x));
            ++proposals;
            if (uniform01(rng) * d_max < dx)
                return x;
            if (proposals > kMaxProposalsPerDraw)
                throw RejectionInefficiency("marginal proposal acceptance is below 1e-5");
        }
    };
    return [draw_d, kernel, c_min](std::mt19937_64& rng, double& x, double& y) -> std::int64_t {
        std::int64_t pairs = 0;
        for (;;) {
            std::int64_t inner = 0;
            x = draw_d(rng, inner);
            y = draw_d(rng, inner);
            ++pairs;
            const double ratio = 2.0 * c_min / (kernel.c.eval(x) + kernel.c.eval(y));
            if (ratio > 1.0)
                throw InvariantViolation("rejection envelope for 1/(c(x)+c(y)) is violated");
            if (uniform01(rng) < ratio)
                return pairs;
            if (pairs > kMaxProposalsPerDraw)
                throw RejectionInefficiency("pair acceptance is below 1e-5");
        }
    };
}

PairSampler make_sampler(const Model& model)
{
    if (const auto* discrete = std::get_if<DiscreteJoint>(&model))
        return make_discrete_sampler(*discrete);
    const auto& density = std::get<DensityModel>(model);
    if (const auto* prod = std::get_if<ProductKernel>(&density.kernel()))
        return make_product_sampler(*prod);
    if (const auto* mix = std::get_if<MixtureUniform>(&density.kernel()))
        return make_mixture_sampler(*mix);
    return make_cauchy_sampler(density, std::get<CauchyKernel>(density.kernel()));
}

BatchStats run_batch(const PairSampler& sampler, double r, double s, std::int64_t count, std::uint64_t seed,
                     std::uint64_t batch)
{
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(batch + 1)));
    BatchStats st;
    double x = 0.0, y = 0.0;
    for (std::int64_t k = 0; k < count; ++k) {
        st.proposals += sampler(rng, x, y);
        st.accepted += 1;
        const double v = std::pow(std::fabs(x + s * y), r);
        if (std::isinf(v)) {
            st.infinite = true;
            continue;
        }
        ++st.count;
        const double d = v - st.mean;
        st.mean += d / static_cast<double>(st.count);
        st.m2 += d * (v - st.mean);
    }
    return st;
}

} // namespace

MomentEstimate moment_monte_carlo(const Model& model, const RExponent& r, Sign sign, std::int64_t n,
                                  std::uint64_t seed, unsigned workers)
{
    if (n < 1000)
        throw InvalidArgument("Monte Carlo needs at least 1000 samples, got " + std::to_string(n));
    const PairSampler sampler = make_sampler(model);
    const double s = sign == Sign::Plus ? 1.0 : -1.0;
    const std::int64_t batches = (n + kBatchSize - 1) / kBatchSize;
    std::vector<BatchStats> results(static_cast<std::size_t>(batches));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(batches));

    auto work = [&](unsigned worker, unsigned stride) {
        for (std::int64_t b = worker; b < batches; b += stride) {
            const std::int64_t count = std::min(kBatchSize, n - b * kBatchSize);
            try {
                results[static_cast<std::size_t>(b)] =
                    run_batch(sampler, r.value(), s, count, seed, static_cast<std::uint64_t>(b));
            } catch (...) {
                failures[static_cast<std::size_t>(b)] = std::current_exception();
            }
        }
    };
    const unsigned stride = std::max(1u, workers);
    if (stride == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < stride; ++w)
            pool.emplace_back(work, w, stride);
        for (auto& t : pool)
            t.join();
    }
    for (const auto& f : failures)
        if (f)
            std::rethrow_exception(f);

    // Chan et al. pairwise combination, in batch order.
    BatchStats total;
    for (const BatchStats& b : results) {
        total.infinite = total.infinite || b.infinite;
        total.proposals += b.proposals;
        total.accepted += b.accepted;
        if (b.count == 0)
            continue;
        const std::int64_t combined = total.count + b.count;
        const double d = b.mean - total.mean;
        total.mean += d * static_cast<double>(b.count) / static_cast<double>(combined);
        total.m2 += b.m2 + d * d * static_cast<double>(total.count) * static_cast<double>(b.count) /
                               static_cast<double>(combined);
        total.count = combined;
    }
    const double acceptance = static_cast<double>(total.accepted) / static_cast<double>(total.proposals);
    if (acceptance < 0.01)
        throw RejectionInefficiency("acceptance rate " + std::to_string(acceptance) + " is below 1%");

    MomentEstimate est;
    est.method = Method::MonteCarlo;
    est.n = n;
    est.seed = seed;
    if (const auto* discrete = std::get_if<DiscreteJoint>(&model); discrete && !discrete->is_finite())
        est.heuristic_bound = true;
    if (total.infinite) {
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }
    est.value = total.mean;
    const double variance = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
    est.abs_error_bound = kNormalQuantile99 * std::sqrt(variance / static_cast<double>(total.count));
    return est;
}

} // namespace momentlab
