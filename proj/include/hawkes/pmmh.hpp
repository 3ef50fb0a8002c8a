#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smc.hpp"

namespace hawkes {

struct PmmhConfig {
    int iterations = 50000;
    double step_sigma = 0.05;  // random-walk sd, shared across coordinates
    std::optional<std::vector<double>> step_sigma_per_coordinate{};  // overrides step_sigma when set
    int burn_in = 1000;
    SmcConfig smc{};
    std::optional<std::vector<double>> init{};  // transformed-scale start
    std::uint64_t seed = 0;
};

struct ChainRecord {
    int iteration = 0;
    std::vector<double> transformed;
    std::vector<double> natural;  // (nu, eta, [alpha], beta)
    double loglik = 0.0;          // cached estimate for the current state
    bool accepted = false;
    double log_accept_ratio = 0.0;
};

struct ChainOutput {
    KernelFamily family;
    std::vector<ChainRecord> records;  // records[0] is the initial state
};

/// log of the Metropolis ratio for a symmetric proposal: the proposal
/// densities cancel and only the likelihood-estimate ratio remains.
[[nodiscard]] inline double acceptance_log_ratio(double proposed_loglik, double cached_loglik) {
    if (proposed_loglik == kNegInf) return kNegInf;  // certain rejection
    if (cached_loglik == kNegInf) return std::numeric_limits<double>::infinity();
    return proposed_loglik - cached_loglik;
}

/// theta on the transformed scale plus the likelihood estimate computed
/// when theta was last accepted. The cache is never recomputed while
/// theta stays current.
struct ChainState {
    std::vector<double> transformed;
    double cached_loglik;
};

/// Estimator of the log-likelihood at given parameters; the seed selects
/// the Monte Carlo substream (ignored by exact likelihoods).
using LogLikEstimator = std::function<double(const HawkesParams&, std::uint64_t seed)>;

namespace detail {

inline constexpr std::uint64_t kInitTag = 0x494e4954;      // "INIT"
inline constexpr std::uint64_t kProposalTag = 0x50524f50;  // "PROP"
inline constexpr std::uint64_t kAcceptTag = 0x41435054;    // "ACPT"
inline constexpr std::uint64_t kSmcTag = 0x534d4320;       // "SMC "

}  // namespace detail

/// One PMMH transition. The proposal is theta + sigma * Z on the
/// transformed scale; the proposed state's likelihood comes from a fresh
/// substream keyed by (seed, iteration), and the uniform U is drawn fresh
/// for every proposal. Rejection leaves the state, cache included,
/// bit-for-bit unchanged.
[[nodiscard]] inline std::pair<ChainState, ChainRecord> pmmh_step(const ChainState& state,
                                                                  KernelFamily family,
                                                                  const PmmhConfig& config,
                                                                  const LogLikEstimator& loglik,
                                                                  int iteration) {
    const RngStream base(config.seed);
    RngStream proposal_stream =
        base.substream(detail::kProposalTag, static_cast<std::uint64_t>(iteration));
    std::vector<double> proposed = state.transformed;
    for (std::size_t k = 0; k < proposed.size(); ++k) {
        const double sigma = config.step_sigma_per_coordinate
                                 ? (*config.step_sigma_per_coordinate)[k]
                                 : config.step_sigma;
        proposed[k] += sigma * proposal_stream.normal();
    }

    const HawkesParams proposed_params = from_transformed(family, proposed);
    const std::uint64_t smc_seed =
        base.substream(detail::kSmcTag).substream_key(static_cast<std::uint64_t>(iteration));
    const double proposed_loglik = loglik(proposed_params, smc_seed);

    const double log_ratio = acceptance_log_ratio(proposed_loglik, state.cached_loglik);
    RngStream accept_stream =
        base.substream(detail::kAcceptTag, static_cast<std::uint64_t>(iteration));
    const bool accept = std::log(accept_stream.uniform()) <= log_ratio;

    ChainState next = state;
    if (accept) {
        next.transformed = std::move(proposed);
        next.cached_loglik = proposed_loglik;
    }
    ChainRecord record{iteration, next.transformed,
                       natural_vector(from_transformed(family, next.transformed)),
                       next.cached_loglik, accept, log_ratio};
    return {std::move(next), std::move(record)};
}

/// Run the chain: draw theta(0) from a standard normal on the transformed
/// scale (unless an init vector is supplied), estimate its likelihood
/// once, then iterate pmmh_step. Fully reproducible given the seed.
[[nodiscard]] inline ChainOutput pmmh_run(const PmmhConfig& config, KernelFamily family,
                                          const LogLikEstimator& loglik) {
    if (!(config.iterations > config.burn_in && config.burn_in >= 0)) {
        throw std::invalid_argument("pmmh_run: need iterations > burn_in >= 0");
    }
    if (!(config.step_sigma > 0.0)) {
        throw std::invalid_argument("pmmh_run: step_sigma must be positive");
    }
    const int dim = transformed_dim(family);
    if (config.step_sigma_per_coordinate) {
        if (static_cast<int>(config.step_sigma_per_coordinate->size()) != dim) {
            throw std::invalid_argument("pmmh_run: per-coordinate sigma has wrong dimension");
        }
        for (double s : *config.step_sigma_per_coordinate) {
            if (!(s > 0.0)) throw std::invalid_argument("pmmh_run: sigmas must be positive");
        }
    }
    const RngStream base(config.seed);

    std::vector<double> start;
    if (config.init) {
        if (static_cast<int>(config.init->size()) != dim) {
            throw std::invalid_argument("pmmh_run: init vector has wrong dimension");
        }
        start = *config.init;
    } else {
        RngStream init_stream = base.substream(detail::kInitTag);
        start.resize(static_cast<std::size_t>(dim));
        for (double& x : start) x = init_stream.normal();
    }

    const std::uint64_t init_seed = base.substream(detail::kSmcTag).substream_key(0);
    const double init_loglik = loglik(from_transformed(family, start), init_seed);
    ChainState state{std::move(start), init_loglik};

    ChainOutput out;
    out.family = family;
    out.records.reserve(static_cast<std::size_t>(config.iterations) + 1);
    out.records.push_back(ChainRecord{0, state.transformed,
                                      natural_vector(from_transformed(family, state.transformed)),
                                      state.cached_loglik, true, 0.0});
    for (int iteration = 1; iteration <= config.iterations; ++iteration) {
        auto [next, record] = pmmh_step(state, family, config, loglik, iteration);
        state = std::move(next);
        out.records.push_back(std::move(record));
    }
    return out;
}

/// Chain against the SMC likelihood estimate of the given count data.
[[nodiscard]] inline ChainOutput pmmh_run(const PmmhConfig& config, KernelFamily family,
                                          const CountData& data) {
    LogLikEstimator estimator = [&config, &data](const HawkesParams& params, std::uint64_t seed) {
        SmcConfig smc = config.smc;
        smc.seed = seed;
        return smc_loglik(params, data, smc);
    };
    return pmmh_run(config, family, estimator);
}

struct ParameterSummary {
    std::string name;
    double estimate;  // posterior median
    double lower;     // 2.5 percentile
    double upper;     // 97.5 percentile
    double se;        // (upper - lower) / (2 * z_{0.975})
};

struct Summary {
    std::vector<ParameterSummary> parameters;
    double acceptance_rate;
};

/// Quantile with linear interpolation between order statistics.
[[nodiscard]] inline double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = p * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - std::floor(h);
    return values[lo] + frac * (values[hi] - values[lo]);
}

/// Point estimates, 95% interval limits, and SEs from the post-burn-in
/// natural-scale draws, plus the post-burn-in acceptance rate.
[[nodiscard]] inline Summary summarize_chain(const ChainOutput& output, int burn_in) {
    if (output.records.empty()) throw std::invalid_argument("summarize_chain: empty chain");
    const int last_iteration = output.records.back().iteration;
    if (burn_in < 0 || burn_in >= last_iteration) {
        throw std::invalid_argument("summarize_chain: burn-in must be below the chain length");
    }
    const std::vector<std::string> names = parameter_names(output.family);
    const std::size_t dim = names.size();

    std::vector<std::vector<double>> draws(dim);
    long accepted = 0;
    long used = 0;
    for (const ChainRecord& r : output.records) {
        if (r.iteration <= burn_in) continue;
        for (std::size_t k = 0; k < dim; ++k) draws[k].push_back(r.natural[k]);
        accepted += r.accepted ? 1 : 0;
        ++used;
    }

    const double z975 = normal_quantile(0.975);
    Summary summary;
    summary.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(used);
    for (std::size_t k = 0; k < dim; ++k) {
        const double lower = quantile(draws[k], 0.025);
        const double upper = quantile(draws[k], 0.975);
        const double median = quantile(draws[k], 0.5);
        summary.parameters.push_back(
            {names[k], median, lower, upper, (upper - lower) / (2.0 * z975)});
    }
    return summary;
}

}  // namespace hawkes
