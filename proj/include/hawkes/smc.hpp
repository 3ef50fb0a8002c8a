#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "special_functions.hpp"

namespace hawkes {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Merge every maximal run of two or more consecutive zero counts into a
/// single zero-count interval, dropping the interior boundaries. Total
/// counts and the final observation time are unchanged; idempotent.
[[nodiscard]] inline CountData collapse_zero_runs(const CountData& data) {
    std::vector<double> times{data.times.front()};
    std::vector<int> counts;
    const int m = data.num_intervals();
    int i = 0;
    while (i < m) {
        if (data.counts[i] == 0) {
            int j = i;
            while (j + 1 < m && data.counts[j + 1] == 0) ++j;
            counts.push_back(0);
            times.push_back(data.times[j + 1]);
            i = j + 1;
        } else {
            counts.push_back(data.counts[i]);
            times.push_back(data.times[i + 1]);
            ++i;
        }
    }
    return CountData(std::move(times), std::move(counts));
}

/// Poisson proposal for the hidden events of one interval. The rate is
/// chosen so the count-th proposal event lands inside the interval with
/// probability 0.95: rho = gamma-quantile(0.95; count, 1) / length.
struct ProposalSpec {
    double rho;
    int count;
    double t_begin;
    double t_end;
};

[[nodiscard]] inline ProposalSpec poisson_rate(int count, double t_begin, double t_end) {
    if (count < 1) {
        throw std::invalid_argument("poisson_rate: zero-count intervals need no proposal");
    }
    if (!(t_end > t_begin)) {
        throw std::invalid_argument("poisson_rate: interval must have positive length");
    }
    const double q = gamma_quantile(static_cast<double>(count), 0.95);
    const double rho = q / (t_end - t_begin);
    if (!std::isfinite(rho)) {
        throw std::invalid_argument("poisson_rate: interval too short for a finite proposal rate");
    }
    return {rho, count, t_begin, t_end};
}

/// Append the first `count` points of a Poisson(rho) process started at
/// t_begin: cumulative sums of iid exponential gaps. Points may land
/// beyond t_end; the conditional-probability zero branch handles that.
inline void propose_interval_events(const ProposalSpec& spec, RngStream& rng,
                                    std::vector<double>& out) {
    double t = spec.t_begin;
    for (int k = 0; k < spec.count; ++k) {
        t += rng.exponential(spec.rho);
        out.push_back(t);
    }
}

/// log p(n_i | history): -infinity when the last event overshoots t_end,
/// otherwise minus the compensator over (max(t_begin, last event), t_end].
[[nodiscard]] inline double log_interval_prob(const HawkesParams& params,
                                              std::span<const double> history, double t_begin,
                                              double t_end) {
    const double last = history.empty() ? t_begin : history.back();
    if (last > t_end) return kNegInf;
    return -compensator_segment(params, history, std::max(t_begin, last), t_end);
}

[[nodiscard]] inline double interval_prob(const HawkesParams& params,
                                          std::span<const double> history, double t_begin,
                                          double t_end) {
    return std::exp(log_interval_prob(params, history, t_begin, t_end));
}

/// Radon-Nikodym weight of the target hidden-event law against the
/// Poisson proposal, evaluated at the particle. `history` holds the full
/// event record with the `spec.count` proposed times appended at the end.
[[nodiscard]] inline double log_particle_weight(const HawkesParams& params,
                                                std::span<const double> history,
                                                const ProposalSpec& spec) {
    if (spec.count == 0) return 0.0;
    const std::size_t n = history.size();
    const std::size_t first = n - static_cast<std::size_t>(spec.count);
    double log_target = 0.0;
    for (std::size_t k = first; k < n; ++k) {
        log_target += std::log(intensity(params, history, history[k]));
    }
    const double upper = std::max(history.back(), spec.t_begin);
    log_target -= compensator_segment(params, history, spec.t_begin, upper);
    const double log_proposal =
        spec.count * std::log(spec.rho) - spec.rho * (upper - spec.t_begin);
    return log_target - log_proposal;
}

[[nodiscard]] inline double particle_weight(const HawkesParams& params,
                                            std::span<const double> history,
                                            const ProposalSpec& spec) {
    return std::exp(log_particle_weight(params, history, spec));
}

/// One interval of the exponential-kernel fast path. The scalar state is
/// the accumulated excitation eps(t) = lambda(t) - nu, which decays by
/// exp(-dt/beta) between events and jumps by eta/beta at each one.
struct ExpStepResult {
    double excitation_out;
    double log_weight;
    double log_prob;
};

[[nodiscard]] inline ExpStepResult exp_state_step(double excitation_in, const HawkesParams& params,
                                                  int count, double t_begin, double t_end,
                                                  double rho, std::span<const double> proposed) {
    const double beta = params.kernel.scale();
    const double jump = params.kernel.eta() / beta;
    double excitation = excitation_in;

    if (count == 0) {
        const double gap = t_end - t_begin;
        const double decay = std::exp(-gap / beta);
        const double log_prob = -(params.nu * gap + excitation * beta * (1.0 - decay));
        return {excitation * decay, 0.0, log_prob};
    }

    double prev = t_begin;
    double log_target = 0.0;
    double integral = 0.0;
    for (int k = 0; k < count; ++k) {
        const double gap = proposed[static_cast<std::size_t>(k)] - prev;
        const double decay = std::exp(-gap / beta);
        integral += params.nu * gap + excitation * beta * (1.0 - decay);
        excitation *= decay;
        log_target += std::log(params.nu + excitation);
        excitation += jump;
        prev = proposed[static_cast<std::size_t>(k)];
    }
    const double log_proposal = count * std::log(rho) - rho * (prev - t_begin);
    const double log_weight = log_target - integral - log_proposal;

    if (prev > t_end) {
        // Overshooting particle: conditional probability is zero, so the
        // state can never be selected again; park it at a finite value.
        return {0.0, log_weight, kNegInf};
    }
    const double tail = t_end - prev;
    const double tail_decay = std::exp(-tail / beta);
    const double log_prob = -(params.nu * tail + excitation * beta * (1.0 - tail_decay));
    return {excitation * tail_decay, log_weight, log_prob};
}

/// J weighted hidden-state hypotheses: full event histories on the
/// generic path, the scalar excitation state on the exponential fast
/// path. log_fitness accumulates each particle's log fitness since the
/// last resampling step.
struct ParticleSystem {
    [[nodiscard]] static ParticleSystem generic(int num_particles) {
        ParticleSystem ps(num_particles);
        ps.histories.resize(static_cast<std::size_t>(num_particles));
        return ps;
    }
    [[nodiscard]] static ParticleSystem exponential_state(int num_particles) {
        ParticleSystem ps(num_particles);
        ps.fast_path = true;
        ps.excitation.assign(static_cast<std::size_t>(num_particles), 0.0);
        return ps;
    }

    bool fast_path = false;
    std::vector<std::vector<double>> histories;
    std::vector<double> excitation;
    std::vector<double> log_fitness;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(log_fitness.size()); }

  private:
    explicit ParticleSystem(int num_particles) {
        if (num_particles < 1) throw std::invalid_argument("ParticleSystem: need at least one particle");
        log_fitness.assign(static_cast<std::size_t>(num_particles), 0.0);
    }
};

namespace detail {

inline constexpr std::uint64_t kResampleTag = 0x52534d50;  // "RSMP"
inline constexpr std::uint64_t kProposeTag = 0x50525053;   // "PRPS"

// J iid multinomial draws via the sorted-uniform / exponential-spacings
// construction; ancestors come out sorted, which is a permutation of the
// iid draws and therefore equivalent for every symmetric functional.
inline void multinomial_ancestors(std::span<const double> fitness, RngStream& rng,
                                  std::vector<std::uint32_t>& ancestors,
                                  std::vector<double>& spacing) {
    const std::size_t count = fitness.size();
    ancestors.resize(count);
    spacing.resize(count + 1);
    double running = 0.0;
    for (std::size_t k = 0; k <= count; ++k) {
        running += rng.exponential(1.0);
        spacing[k] = running;
    }
    double total_fitness = 0.0;
    for (double f : fitness) total_fitness += f;
    const double scale = total_fitness / spacing[count];
    std::size_t idx = 0;
    double cum = fitness[0];
    for (std::size_t k = 0; k < count; ++k) {
        const double pos = spacing[k] * scale;
        while (pos > cum && idx + 1 < count) cum += fitness[++idx];
        ancestors[k] = static_cast<std::uint32_t>(idx);
    }
}

inline void gather_particles(ParticleSystem& ps, std::span<const std::uint32_t> ancestors,
                             std::vector<std::vector<double>>& history_buffer,
                             std::vector<double>& excitation_buffer) {
    const std::size_t count = ancestors.size();
    if (ps.fast_path) {
        excitation_buffer.resize(count);
        for (std::size_t j = 0; j < count; ++j) excitation_buffer[j] = ps.excitation[ancestors[j]];
        ps.excitation.swap(excitation_buffer);
    } else {
        history_buffer.resize(count);
        for (std::size_t j = 0; j < count; ++j) history_buffer[j] = ps.histories[ancestors[j]];
        ps.histories.swap(history_buffer);
    }
    std::fill(ps.log_fitness.begin(), ps.log_fitness.end(), 0.0);
}

}  // namespace detail

/// Bootstrap resampling: replace the particles by J iid multinomial
/// draws with probabilities proportional to `fitness`, and reset the
/// accumulated fitness. When all fitness values are equal the multinomial
/// is uniform and the system passes through unchanged.
inline void resample_multinomial(ParticleSystem& system, std::span<const double> fitness,
                                 RngStream& rng) {
    if (static_cast<int>(fitness.size()) != system.size()) {
        throw std::invalid_argument("resample_multinomial: fitness size mismatch");
    }
    double max_fit = 0.0;
    double min_fit = std::numeric_limits<double>::infinity();
    for (double f : fitness) {
        if (!(f >= 0.0) || !std::isfinite(f)) {
            throw std::invalid_argument("resample_multinomial: fitness must be finite and non-negative");
        }
        max_fit = std::max(max_fit, f);
        min_fit = std::min(min_fit, f);
    }
    if (max_fit == 0.0) {
        throw std::domain_error("resample_multinomial: all-zero fitness (degenerate filter)");
    }
    if (max_fit == min_fit) {
        std::fill(system.log_fitness.begin(), system.log_fitness.end(), 0.0);
        return;
    }
    std::vector<std::uint32_t> ancestors;
    std::vector<double> spacing;
    std::vector<std::vector<double>> history_buffer;
    std::vector<double> excitation_buffer;
    detail::multinomial_ancestors(fitness, rng, ancestors, spacing);
    detail::gather_particles(system, ancestors, history_buffer, excitation_buffer);
}

struct SmcConfig {
    int num_particles = 256;
    std::uint64_t seed = 0;
    bool exp_fast_path = true;  // epsilon-state specialization for exponential kernels
};

namespace detail {

struct GenericStepper {
    static std::pair<double, double> step_events(ParticleSystem& ps, int j,
                                                 const HawkesParams& params,
                                                 const ProposalSpec& spec,
                                                 std::span<const double> proposed) {
        auto& history = ps.histories[static_cast<std::size_t>(j)];
        history.insert(history.end(), proposed.begin(), proposed.end());
        const double lw = log_particle_weight(params, history, spec);
        const double lp = log_interval_prob(params, history, spec.t_begin, spec.t_end);
        return {lw, lp};
    }
    static double step_zero(ParticleSystem& ps, int j, const HawkesParams& params, double t_begin,
                            double t_end) {
        return log_interval_prob(params, ps.histories[static_cast<std::size_t>(j)], t_begin, t_end);
    }
};

struct ExpStepper {
    static std::pair<double, double> step_events(ParticleSystem& ps, int j,
                                                 const HawkesParams& params,
                                                 const ProposalSpec& spec,
                                                 std::span<const double> proposed) {
        auto& state = ps.excitation[static_cast<std::size_t>(j)];
        const ExpStepResult r =
            exp_state_step(state, params, spec.count, spec.t_begin, spec.t_end, spec.rho, proposed);
        state = r.excitation_out;
        return {r.log_weight, r.log_prob};
    }
    static double step_zero(ParticleSystem& ps, int j, const HawkesParams& params, double t_begin,
                            double t_end) {
        auto& state = ps.excitation[static_cast<std::size_t>(j)];
        const ExpStepResult r = exp_state_step(state, params, 0, t_begin, t_end, 0.0, {});
        state = r.excitation_out;
        return r.log_prob;
    }
};

// One pass of the bootstrap filter over all observation intervals.
//
// Resampling happens on entry to an interval (fitness = previous w * p),
// except inside a zero run, where weights accumulate and the per-interval
// contributions telescope. On collapse-preprocessed data this is exactly
// the resample-every-interval scheme; on raw data it makes the estimate
// invariant to zero-run collapsing under aligned substreams. Substreams
// are keyed by each interval's left endpoint for the same reason.
template <class Stepper>
double smc_engine(const HawkesParams& params, const CountData& data, const SmcConfig& cfg,
                  ParticleSystem& ps, std::vector<double>* interval_loglik) {
    const int num_particles = cfg.num_particles;
    const RngStream base(cfg.seed);
    const RngStream resample_base = base.substream(kResampleTag);
    const RngStream propose_base = base.substream(kProposeTag);

    std::vector<double>& log_fit = ps.log_fitness;
    std::vector<double> fitness(static_cast<std::size_t>(num_particles), 1.0);
    std::vector<double> score(static_cast<std::size_t>(num_particles));
    std::vector<double> proposed;
    std::vector<std::uint32_t> ancestors;
    std::vector<double> spacing;
    std::vector<std::vector<double>> history_buffer;
    std::vector<double> excitation_buffer;

    double total = 0.0;
    double log_denominator = std::log(static_cast<double>(num_particles));
    bool fitness_all_equal = true;

    const int num_intervals = data.num_intervals();
    for (int i = 0; i < num_intervals; ++i) {
        const double t_begin = data.times[static_cast<std::size_t>(i)];
        const double t_end = data.times[static_cast<std::size_t>(i) + 1];
        const int n = data.counts[static_cast<std::size_t>(i)];
        const bool inside_zero_run = i > 0 && n == 0 && data.counts[static_cast<std::size_t>(i) - 1] == 0;

        if (i > 0 && !inside_zero_run) {
            if (!fitness_all_equal) {
                RngStream rs = resample_base.substream(time_label(t_begin));
                detail::multinomial_ancestors(fitness, rs, ancestors, spacing);
                detail::gather_particles(ps, ancestors, history_buffer, excitation_buffer);
            } else {
                std::fill(log_fit.begin(), log_fit.end(), 0.0);
            }
            log_denominator = std::log(static_cast<double>(num_particles));
        }

        if (n == 0) {
            for (int j = 0; j < num_particles; ++j) {
                score[static_cast<std::size_t>(j)] =
                    log_fit[static_cast<std::size_t>(j)] + Stepper::step_zero(ps, j, params, t_begin, t_end);
            }
        } else {
            const ProposalSpec spec = poisson_rate(n, t_begin, t_end);
            const RngStream interval_base = propose_base.substream(time_label(t_begin));
            for (int j = 0; j < num_particles; ++j) {
                proposed.clear();
                RngStream particle_stream = interval_base.substream(static_cast<std::uint64_t>(j));
                propose_interval_events(spec, particle_stream, proposed);
                const auto [lw, lp] = Stepper::step_events(ps, j, params, spec, proposed);
                score[static_cast<std::size_t>(j)] = log_fit[static_cast<std::size_t>(j)] + lw + lp;
            }
        }

        double max_score = kNegInf;
        for (double s : score) max_score = std::max(max_score, s);
        if (max_score == kNegInf) {
            // Every particle has zero conditional probability: the interval
            // estimate is 0 and the parameter is hopeless for these data.
            if (interval_loglik) interval_loglik->push_back(kNegInf);
            return kNegInf;
        }
        double sum = 0.0;
        bool all_equal = true;
        for (int j = 0; j < num_particles; ++j) {
            fitness[static_cast<std::size_t>(j)] = std::exp(score[static_cast<std::size_t>(j)] - max_score);
            sum += fitness[static_cast<std::size_t>(j)];
            all_equal = all_equal && score[static_cast<std::size_t>(j)] == score[0];
        }
        fitness_all_equal = all_equal;
        const double log_numerator = std::log(sum) + max_score;
        const double contribution = log_numerator - log_denominator;
        total += contribution;
        if (interval_loglik) interval_loglik->push_back(contribution);
        std::copy(score.begin(), score.end(), log_fit.begin());
        log_denominator = log_numerator;
    }
    return total;
}

}  // namespace detail

/// Unbiased SMC estimate of the log-likelihood of interval counts.
///
/// Per interval: bootstrap-resample by the previous fitness, propose the
/// n_i hidden event times from the Poisson proposal, weight them by the
/// Radon-Nikodym derivative, and average weight * conditional probability
/// across particles. Returns -infinity (never NaN) when an interval
/// estimate degenerates to zero. Deterministic given cfg.seed.
[[nodiscard]] inline double smc_loglik(const HawkesParams& params, const CountData& data,
                                       const SmcConfig& cfg,
                                       std::vector<double>* interval_loglik = nullptr) {
    if (cfg.num_particles < 1) {
        throw std::invalid_argument("smc_loglik: need at least one particle");
    }
    if (interval_loglik) {
        interval_loglik->clear();
        interval_loglik->reserve(static_cast<std::size_t>(data.num_intervals()));
    }
    const bool fast = cfg.exp_fast_path && params.kernel.family() == KernelFamily::exponential;
    ParticleSystem ps = fast ? ParticleSystem::exponential_state(cfg.num_particles)
                             : ParticleSystem::generic(cfg.num_particles);
    return fast ? detail::smc_engine<detail::ExpStepper>(params, data, cfg, ps, interval_loglik)
                : detail::smc_engine<detail::GenericStepper>(params, data, cfg, ps, interval_loglik);
}

}  // namespace hawkes
