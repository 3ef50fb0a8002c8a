#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "special_functions.hpp"

namespace hawkes {

enum class KernelFamily { exponential, gamma, weibull };

[[nodiscard]] inline bool has_shape(KernelFamily family) noexcept {
    return family != KernelFamily::exponential;
}

[[nodiscard]] inline std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::exponential: return "exp";
        case KernelFamily::gamma: return "gamma";
        case KernelFamily::weibull: return "weibull";
    }
    return "?";
}

/// Excitation kernel g(t) of a self-exciting process.
///
/// All three parametrisations integrate to the branching ratio eta over
/// (0, inf); eta < 1 keeps the process subcritical. g vanishes on t <= 0.
class ExcitationKernel {
  public:
    [[nodiscard]] static ExcitationKernel exponential(double eta, double scale) {
        return ExcitationKernel(KernelFamily::exponential, eta, 1.0, scale);
    }
    [[nodiscard]] static ExcitationKernel gamma(double eta, double shape, double scale) {
        return ExcitationKernel(KernelFamily::gamma, eta, shape, scale);
    }
    [[nodiscard]] static ExcitationKernel weibull(double eta, double shape, double scale) {
        return ExcitationKernel(KernelFamily::weibull, eta, shape, scale);
    }
    [[nodiscard]] static ExcitationKernel make(KernelFamily family, double eta, double shape,
                                               double scale) {
        return ExcitationKernel(family, eta, shape, scale);
    }

    [[nodiscard]] KernelFamily family() const noexcept { return family_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] double shape() const noexcept { return shape_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    /// g(t); zero for t <= 0.
    [[nodiscard]] double density(double t) const {
        if (t <= 0.0) return 0.0;
        switch (family_) {
            case KernelFamily::exponential:
                return eta_ / scale_ * std::exp(-t / scale_);
            case KernelFamily::gamma:
                return std::exp(log_coeff_ + (shape_ - 1.0) * std::log(t) - t / scale_);
            case KernelFamily::weibull: {
                const double u = t / scale_;
                return eta_ * shape_ / scale_ * std::pow(u, shape_ - 1.0) * std::exp(-std::pow(u, shape_));
            }
        }
        return 0.0;
    }

    /// G(t) = integral of g over (0, t]; increases from 0 to eta.
    [[nodiscard]] double integral(double t) const {
        if (t <= 0.0) return 0.0;
        switch (family_) {
            case KernelFamily::exponential:
                return eta_ * -std::expm1(-t / scale_);
            case KernelFamily::gamma:
                return eta_ * reg_gamma_p(shape_, t / scale_);
            case KernelFamily::weibull:
                return eta_ * -std::expm1(-std::pow(t / scale_, shape_));
        }
        return 0.0;
    }

    /// Offset at which g peaks; 0 for monotone-decreasing kernels.
    [[nodiscard]] double mode_offset() const noexcept { return mode_; }

    /// sup over u >= gap of g(u). Infinite at gap = 0 when shape < 1.
    [[nodiscard]] double density_sup(double gap) const {
        const double at = std::max(gap, mode_);
        if (at <= 0.0) return peak_;
        return std::max(density(at), 0.0);
    }

  private:
    ExcitationKernel(KernelFamily family, double eta, double shape, double scale)
        : family_(family), eta_(eta), shape_(shape), scale_(scale) {
        if (!(eta >= 0.0 && eta < 1.0)) {
            throw std::invalid_argument("kernel: eta must lie in [0, 1)");
        }
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw std::invalid_argument("kernel: scale must be positive and finite");
        }
        if (!(shape > 0.0) || !std::isfinite(shape)) {
            throw std::invalid_argument("kernel: shape must be positive and finite");
        }
        log_coeff_ = family == KernelFamily::gamma
                         ? std::log(eta) - std::lgamma(shape) - shape * std::log(scale)
                         : 0.0;
        switch (family) {
            case KernelFamily::exponential:
                mode_ = 0.0;
                peak_ = eta / scale;
                break;
            case KernelFamily::gamma:
                mode_ = shape > 1.0 ? (shape - 1.0) * scale : 0.0;
                break;
            case KernelFamily::weibull:
                mode_ = shape > 1.0 ? scale * std::pow((shape - 1.0) / shape, 1.0 / shape) : 0.0;
                break;
        }
        if (family != KernelFamily::exponential) {
            if (mode_ > 0.0) {
                peak_ = density(mode_);
            } else if (shape == 1.0) {
                peak_ = eta / scale;  // reduces to the exponential kernel
            } else {
                peak_ = std::numeric_limits<double>::infinity();  // g(0+) diverges
            }
        }
        if (eta == 0.0) peak_ = 0.0;
    }

    KernelFamily family_;
    double eta_;
    double shape_;
    double scale_;
    double log_coeff_ = 0.0;
    double mode_ = 0.0;
    double peak_ = 0.0;
};

}  // namespace hawkes
