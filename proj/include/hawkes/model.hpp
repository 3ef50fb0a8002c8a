#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernels.hpp"

namespace hawkes {

/// Model parameters theta = (nu, kernel parameters).
struct HawkesParams {
    HawkesParams(double background_rate, ExcitationKernel excitation)
        : nu(background_rate), kernel(excitation) {
        if (!(nu > 0.0) || !std::isfinite(nu)) {
            throw std::invalid_argument("HawkesParams: background rate must be positive and finite");
        }
    }

    double nu;
    ExcitationKernel kernel;
};

[[nodiscard]] inline int transformed_dim(KernelFamily family) noexcept {
    return has_shape(family) ? 4 : 3;
}

[[nodiscard]] inline std::vector<std::string> parameter_names(KernelFamily family) {
    if (has_shape(family)) return {"nu", "eta", "alpha", "beta"};
    return {"nu", "eta", "beta"};
}

[[nodiscard]] inline std::vector<double> natural_vector(const HawkesParams& p) {
    if (has_shape(p.kernel.family())) {
        return {p.nu, p.kernel.eta(), p.kernel.shape(), p.kernel.scale()};
    }
    return {p.nu, p.kernel.eta(), p.kernel.scale()};
}

/// (log nu, logit eta, [log alpha], log beta).
[[nodiscard]] inline std::vector<double> to_transformed(const HawkesParams& p) {
    const double eta = p.kernel.eta();
    std::vector<double> out;
    out.reserve(transformed_dim(p.kernel.family()));
    out.push_back(std::log(p.nu));
    out.push_back(std::log(eta / (1.0 - eta)));
    if (has_shape(p.kernel.family())) out.push_back(std::log(p.kernel.shape()));
    out.push_back(std::log(p.kernel.scale()));
    return out;
}

/// Inverse of to_transformed; any real vector maps to valid parameters.
[[nodiscard]] inline HawkesParams from_transformed(KernelFamily family, std::span<const double> x) {
    if (static_cast<int>(x.size()) != transformed_dim(family)) {
        throw std::invalid_argument("from_transformed: wrong dimension for kernel family");
    }
    const auto bounded_exp = [](double v) { return std::exp(std::clamp(v, -700.0, 700.0)); };
    const double nu = bounded_exp(x[0]);
    double eta = 1.0 / (1.0 + std::exp(-std::clamp(x[1], -700.0, 700.0)));
    if (eta >= 1.0) eta = std::nextafter(1.0, 0.0);
    const double shape = has_shape(family) ? bounded_exp(x[2]) : 1.0;
    const double scale = bounded_exp(x[has_shape(family) ? 3 : 2]);
    return HawkesParams(nu, ExcitationKernel::make(family, eta, shape, scale));
}

/// Event times tau_1 < tau_2 < ... in (0, T], censored at T.
struct EventHistory {
    EventHistory() = default;

    EventHistory(std::vector<double> event_times, double censoring_time)
        : times(std::move(event_times)), horizon(censoring_time) {
        if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
            throw std::invalid_argument("EventHistory: horizon must be finite and non-negative");
        }
        double prev = 0.0;
        for (double t : times) {
            if (!(t > prev)) {
                throw std::invalid_argument("EventHistory: event times must be strictly increasing and > 0");
            }
            prev = t;
        }
        if (!times.empty() && times.back() > horizon) {
            throw std::invalid_argument("EventHistory: event times must not exceed the horizon");
        }
    }

    std::vector<double> times;
    double horizon = 0.0;
};

/// Observation times t_0 < t_1 < ... < t_m and interval counts n_1..n_m.
struct CountData {
    CountData(std::vector<double> observation_times, std::vector<int> interval_counts)
        : times(std::move(observation_times)), counts(std::move(interval_counts)) {
        if (times.size() != counts.size() + 1 || counts.empty()) {
            throw std::invalid_argument("CountData: need m+1 times for m >= 1 counts");
        }
        if (!(times.front() >= 0.0)) {
            throw std::invalid_argument("CountData: origin must be non-negative");
        }
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i] > times[i - 1]) || !std::isfinite(times[i])) {
                throw std::invalid_argument("CountData: observation times must be strictly increasing");
            }
        }
        for (int n : counts) {
            if (n < 0) throw std::invalid_argument("CountData: counts must be non-negative");
        }
    }

    std::vector<double> times;
    std::vector<int> counts;

    [[nodiscard]] int num_intervals() const noexcept { return static_cast<int>(counts.size()); }
    [[nodiscard]] double origin() const noexcept { return times.front(); }
    [[nodiscard]] double horizon() const noexcept { return times.back(); }

    [[nodiscard]] long total_count() const noexcept {
        long total = 0;
        for (int n : counts) total += n;
        return total;
    }

    /// Cumulative counts N_i.
    [[nodiscard]] std::vector<long> cumulative() const {
        std::vector<long> out(counts.size());
        long running = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) out[i] = running += counts[i];
        return out;
    }
};

/// lambda(t) = nu + sum over tau_k < t of g(t - tau_k). Strictly-past
/// events only: an event at exactly t contributes nothing.
[[nodiscard]] inline double intensity(const HawkesParams& p, std::span<const double> events, double t) {
    double lambda = p.nu;
    for (double tau : events) lambda += p.kernel.density(t - tau);
    return lambda;
}

[[nodiscard]] inline double intensity(const HawkesParams& p, const EventHistory& h, double t) {
    return intensity(p, std::span<const double>(h.times), t);
}

/// Integrated intensity over [a, b] given the events in `events`:
/// nu (b - a) + sum_k {G(b - tau_k) - G(a - tau_k)}.
[[nodiscard]] inline double compensator_segment(const HawkesParams& p, std::span<const double> events,
                                                double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("compensator_segment: need a <= b");
    double total = p.nu * (b - a);
    for (double tau : events) {
        total += p.kernel.integral(b - tau) - p.kernel.integral(a - tau);
    }
    return total;
}

/// Log-likelihood of a continuously observed path:
/// sum_i log lambda(tau_i) - integral of lambda over (0, T].
[[nodiscard]] inline double full_loglik(const HawkesParams& p, const EventHistory& h) {
    const std::vector<double>& tau = h.times;
    double sum_log = 0.0;
    if (p.kernel.family() == KernelFamily::exponential) {
        // Markov recursion in the accumulated excitation, O(N).
        const double beta = p.kernel.scale();
        const double jump = p.kernel.eta() / beta;
        double excitation = 0.0;
        double prev = 0.0;
        for (double t : tau) {
            excitation *= std::exp(-(t - prev) / beta);
            sum_log += std::log(p.nu + excitation);
            excitation += jump;
            prev = t;
        }
    } else {
        for (std::size_t i = 0; i < tau.size(); ++i) {
            double lambda = p.nu;
            for (std::size_t j = 0; j < i; ++j) lambda += p.kernel.density(tau[i] - tau[j]);
            sum_log += std::log(lambda);
        }
    }
    double compensator = p.nu * h.horizon;
    for (double t : tau) compensator += p.kernel.integral(h.horizon - t);
    return sum_log - compensator;
}

}  // namespace hawkes
