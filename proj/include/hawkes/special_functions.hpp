#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hawkes {

/// Regularized lower incomplete gamma function P(a, x) = γ(a, x) / Γ(a).
///
/// Series expansion for x < a + 1, Lentz continued fraction for the upper
/// tail otherwise. Relative accuracy is close to machine epsilon, well
/// inside the 1e-12 the gamma-kernel integral needs.
[[nodiscard]] inline double reg_gamma_p(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("reg_gamma_p: shape must be positive and finite");
    }
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;

    const double log_gamma = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * std::numeric_limits<double>::epsilon()) break;
        }
        return sum * std::exp(-x + a * std::log(x) - log_gamma);
    }

    const double fpmin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= std::numeric_limits<double>::epsilon()) break;
    }
    const double q = std::exp(-x + a * std::log(x) - log_gamma) * h;
    return 1.0 - q;
}

/// Standard normal quantile Phi^{-1}(p).
///
/// Acklam's rational approximation refined by one Halley step through
/// erfc, which brings the result to full double precision.
[[nodiscard]] inline double normal_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("normal_quantile: p must lie in [0, 1]");
    }
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = err * std::sqrt(2.0 * 3.141592653589793238462643383279503) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

/// Gamma distribution quantile: the x with P(shape, x) = p (unit rate).
///
/// Safeguarded Newton on the regularized CDF from a Wilson-Hilferty
/// starting point, bisection whenever a step leaves the bracket.
[[nodiscard]] inline double gamma_quantile(double shape, double p) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("gamma_quantile: shape must be positive and finite");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("gamma_quantile: p must lie in (0, 1)");
    }

    const double z = normal_quantile(p);
    const double wh = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
    double x = shape * wh * wh * wh;
    if (!(x > 0.0)) {
        // left-tail asymptotic P(a, x) ~ x^a / Gamma(a + 1)
        x = std::exp((std::log(p) + std::lgamma(shape + 1.0)) / shape);
    }

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    const double log_gamma = std::lgamma(shape);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = reg_gamma_p(shape, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        const double pdf = std::exp((shape - 1.0) * std::log(x) - x - log_gamma);
        double next = x - f / pdf;
        if (!(next > lo && next < hi) || pdf <= 0.0 || !std::isfinite(next)) {
            next = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x);
        x = next;
        if (step <= 1e-12 * std::max(x, 1e-300)) break;
    }
    return x;
}

}  // namespace hawkes
