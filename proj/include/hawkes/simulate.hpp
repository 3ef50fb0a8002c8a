#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace hawkes {

struct SimConfig {
    HawkesParams params;
    double horizon;
    std::uint64_t seed = 0;
    std::uint64_t max_events = 10'000'000;
};

namespace detail {

inline void check_event_cap(std::size_t count, std::uint64_t cap) {
    if (count > cap) {
        throw std::runtime_error("simulate_hawkes: event cap exceeded (runaway path; eta too close to 1?)");
    }
}

// Exponential kernel: lambda(t) = nu + excitation, excitation decays
// between events, so lambda just after the current time dominates the
// whole future and the thinning state is a single scalar.
inline void simulate_exponential(const HawkesParams& p, double horizon, RngStream& rng,
                                 std::uint64_t cap, std::vector<double>& events) {
    const double beta = p.kernel.scale();
    const double jump = p.kernel.eta() / beta;
    double excitation = 0.0;
    double now = 0.0;
    while (true) {
        const double bound = p.nu + excitation;
        const double candidate = now + rng.exponential(bound);
        if (candidate > horizon) return;
        excitation *= std::exp(-(candidate - now) / beta);
        now = candidate;
        if (rng.uniform() * bound <= p.nu + excitation) {
            events.push_back(candidate);
            check_event_cap(events.size(), cap);
            excitation += jump;
        }
    }
}

// Monotone-tail kernels (shape >= 1): each past event's future
// contribution is capped by g at max(elapsed gap, mode offset), so
// lambda_bar = nu + sum of those caps dominates lambda beyond the
// current time. Recomputed after every candidate.
inline void simulate_thinning(const HawkesParams& p, double horizon, RngStream& rng,
                              std::uint64_t cap, std::vector<double>& events) {
    double now = 0.0;
    while (true) {
        double bound = p.nu;
        for (double tau : events) bound += p.kernel.density_sup(now - tau);
        const double candidate = now + rng.exponential(bound);
        if (candidate > horizon) return;
        const double lambda = intensity(p, events, candidate);
        now = candidate;
        if (rng.uniform() * bound <= lambda) {
            events.push_back(candidate);
            check_event_cap(events.size(), cap);
        }
    }
}

// Kernels singular at 0+ (shape < 1) have no finite thinning bound just
// after an event; draw the next event exactly by inverting the
// conditional compensator against an Exp(1) variable.
inline void simulate_inversion(const HawkesParams& p, double horizon, RngStream& rng,
                               std::uint64_t cap, std::vector<double>& events) {
    double now = 0.0;
    while (true) {
        const double target = rng.exponential(1.0);
        // Solve compensator(now, now + u) = target; nu * u <= compensator
        // brackets the root in (0, target / nu].
        double lo = 0.0;
        double hi = target / p.nu;
        double u = hi;
        for (int iter = 0; iter < 200; ++iter) {
            const double f = compensator_segment(p, events, now, now + u) - target;
            if (f > 0.0) hi = u; else lo = u;
            const double lambda = intensity(p, events, now + u);
            double next = u - f / lambda;
            if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - u);
            u = next;
            if (step <= 1e-13 * std::max(u, 1e-300)) break;
        }
        if (now + u > horizon) return;
        now += u;
        events.push_back(now);
        check_event_cap(events.size(), cap);
    }
}

}  // namespace detail

/// Draw one sample path on (0, horizon] from the stream `rng`.
[[nodiscard]] inline EventHistory simulate_hawkes(const HawkesParams& params, double horizon,
                                                  RngStream& rng,
                                                  std::uint64_t max_events = 10'000'000) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("simulate_hawkes: horizon must be finite and non-negative");
    }
    std::vector<double> events;
    if (horizon > 0.0) {
        if (params.kernel.family() == KernelFamily::exponential || params.kernel.eta() == 0.0) {
            detail::simulate_exponential(params, horizon, rng, max_events, events);
        } else if (params.kernel.shape() >= 1.0) {
            detail::simulate_thinning(params, horizon, rng, max_events, events);
        } else {
            detail::simulate_inversion(params, horizon, rng, max_events, events);
        }
    }
    return EventHistory(std::move(events), horizon);
}

[[nodiscard]] inline EventHistory simulate_hawkes(const SimConfig& config) {
    RngStream rng(config.seed);
    return simulate_hawkes(config.params, config.horizon, rng, config.max_events);
}

/// Interval counts n_i = #{k : t_{i-1} < tau_k <= t_i} on the given grid.
[[nodiscard]] inline CountData discretize_counts(const EventHistory& history,
                                                 std::span<const double> grid) {
    if (grid.size() < 2) throw std::invalid_argument("discretize_counts: grid needs at least two points");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("discretize_counts: grid must be strictly increasing");
        }
    }
    if (!(grid.front() >= 0.0)) throw std::invalid_argument("discretize_counts: grid must start at >= 0");
    if (grid.back() > history.horizon) {
        throw std::invalid_argument("discretize_counts: grid extends past the history horizon");
    }
    std::vector<int> counts(grid.size() - 1);
    const auto& tau = history.times;
    auto lo = std::upper_bound(tau.begin(), tau.end(), grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        auto hi = std::upper_bound(lo, tau.end(), grid[i]);
        counts[i - 1] = static_cast<int>(hi - lo);
        lo = hi;
    }
    return CountData(std::vector<double>(grid.begin(), grid.end()), std::move(counts));
}

struct OracleEstimate {
    double probability;
    double standard_error;
    std::int64_t n_sims;
};

/// Brute-force Monte Carlo estimate of Pr{counts on grid == target}:
/// the fraction of simulated paths whose discretized counts match
/// exactly, with its binomial standard error.
[[nodiscard]] inline OracleEstimate brute_force_prob(const HawkesParams& params,
                                                     std::span<const double> grid,
                                                     std::span<const int> target,
                                                     std::int64_t n_sims, std::uint64_t seed,
                                                     int threads = 1) {
    if (n_sims < 1) throw std::invalid_argument("brute_force_prob: n_sims must be >= 1");
    if (grid.size() != target.size() + 1) {
        throw std::invalid_argument("brute_force_prob: grid/target size mismatch");
    }
    for (int t : target) {
        if (t < 0) return {0.0, 0.0, n_sims};
    }
    // The likelihood treats the process as born empty at the grid origin,
    // so simulate on the shifted grid starting at zero.
    std::vector<double> shifted(grid.begin(), grid.end());
    for (double& t : shifted) t -= grid.front();
    const double horizon = shifted.back();
    const RngStream base(seed);

    auto count_matches = [&](std::int64_t begin, std::int64_t end) {
        std::int64_t matches = 0;
        for (std::int64_t rep = begin; rep < end; ++rep) {
            RngStream stream = base.substream(static_cast<std::uint64_t>(rep));
            const EventHistory path = simulate_hawkes(params, horizon, stream);
            const CountData counts = discretize_counts(path, shifted);
            if (std::equal(counts.counts.begin(), counts.counts.end(), target.begin())) ++matches;
        }
        return matches;
    };

    std::int64_t matches = 0;
    const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::min<std::int64_t>(n_sims, 256)));
    if (workers == 1) {
        matches = count_matches(0, n_sims);
    } else {
        std::vector<std::int64_t> partial(workers, 0);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            const std::int64_t begin = n_sims * w / workers;
            const std::int64_t end = n_sims * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] { partial[w] = count_matches(begin, end); });
        }
        for (auto& th : pool) th.join();
        for (std::int64_t m : partial) matches += m;
    }

    const double p = static_cast<double>(matches) / static_cast<double>(n_sims);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_sims));
    return {p, se, n_sims};
}

}  // namespace hawkes
