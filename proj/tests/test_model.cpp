#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hawkes/model.hpp"
#include "hawkes/rng.hpp"

namespace {

using hawkes::CountData;
using hawkes::EventHistory;
using hawkes::ExcitationKernel;
using hawkes::HawkesParams;
using hawkes::KernelFamily;

HawkesParams exp_params(double nu = 2.0, double eta = 0.6, double beta = 0.25) {
    return {nu, ExcitationKernel::exponential(eta, beta)};
}

TEST(Intensity, BackgroundPlusExcitation) {
    const auto p = exp_params();
    EXPECT_EQ(hawkes::intensity(p, std::vector<double>{}, 3.0), 2.0);

    const std::vector<double> history{0.0};
    EXPECT_NEAR(hawkes::intensity(p, history, 1.0), 2.0 + 2.4 * std::exp(-4.0), 1e-14);
}

TEST(Intensity, EventsAtTheEvaluationTimeDoNotContribute) {
    const auto p = exp_params();
    const std::vector<double> history{5.0};
    EXPECT_EQ(hawkes::intensity(p, history, 5.0), 2.0);
    EXPECT_GT(hawkes::intensity(p, history, 5.0 + 1e-9), 2.0);
}

TEST(Intensity, MatchesStrictPastSum) {
    hawkes::RngStream rng(5);
    const auto p = HawkesParams(1.3, ExcitationKernel::gamma(0.4, 2.2, 0.3));
    std::vector<double> history;
    double t = 0.0;
    for (int i = 0; i < 30; ++i) history.push_back(t += rng.exponential(1.0));
    for (double at : {0.5, history[10], history.back(), history.back() + 2.0}) {
        double expected = 1.3;
        for (double tau : history) {
            if (tau < at) expected += p.kernel.density(at - tau);
        }
        EXPECT_NEAR(hawkes::intensity(p, history, at), expected, 1e-12);
    }
}

TEST(Compensator, ClosedFormAndDegenerateSegment) {
    const auto p = HawkesParams(1.0, ExcitationKernel::exponential(0.6, 0.25));
    const std::vector<double> history{0.5};
    EXPECT_EQ(hawkes::compensator_segment(p, history, 0.7, 0.7), 0.0);
    EXPECT_NEAR(hawkes::compensator_segment(p, history, 0.5, 1.0),
                0.5 + 0.6 * (1.0 - std::exp(-2.0)), 1e-14);

    const auto p2 = exp_params();
    EXPECT_NEAR(hawkes::compensator_segment(p2, std::vector<double>{}, 0.0, 3.0), 6.0, 1e-14);
    EXPECT_THROW((void)hawkes::compensator_segment(p2, std::vector<double>{}, 1.0, 0.5),
                 std::invalid_argument);
}

TEST(Compensator, AdditiveOverAdjacentSegments) {
    hawkes::RngStream rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const double eta = 0.8 * rng.uniform();
        const double scale = 0.2 + rng.uniform();
        const int fam = trial % 3;
        const auto kernel = fam == 0   ? ExcitationKernel::exponential(eta, scale)
                            : fam == 1 ? ExcitationKernel::gamma(eta, 0.5 + 3.0 * rng.uniform(), scale)
                                       : ExcitationKernel::weibull(eta, 0.5 + 3.0 * rng.uniform(), scale);
        const HawkesParams p(0.5 + 2.0 * rng.uniform(), kernel);
        std::vector<double> history;
        double t = 0.0;
        for (int i = 0; i < 25; ++i) history.push_back(t += rng.exponential(2.0));
        const double a = 2.0 * rng.uniform();
        const double b = a + 3.0 * rng.uniform();
        const double c = b + 3.0 * rng.uniform();
        const double whole = hawkes::compensator_segment(p, history, a, c);
        const double split = hawkes::compensator_segment(p, history, a, b) +
                             hawkes::compensator_segment(p, history, b, c);
        EXPECT_NEAR(whole, split, 1e-12 * std::max(1.0, std::abs(whole)));
        EXPECT_GE(whole, 0.0);
    }
}

TEST(FullLoglik, PoissonLimitIsExact) {
    const HawkesParams p(2.0, ExcitationKernel::exponential(0.0, 0.25));
    const EventHistory h({0.3, 1.1, 2.9, 4.0}, 5.0);
    EXPECT_NEAR(hawkes::full_loglik(p, h), 4.0 * std::log(2.0) - 2.0 * 5.0, 1e-12);

    const EventHistory empty({}, 1.0);
    EXPECT_NEAR(hawkes::full_loglik(p, empty), -2.0, 1e-15);
}

TEST(FullLoglik, HandEvaluatedExponentialCase) {
    const HawkesParams p(1.0, ExcitationKernel::exponential(0.6, 0.25));
    const EventHistory h({0.5}, 1.0);
    // log lambda(0.5) = log(1); integral = nu*T + G(0.5)
    const double expected = 0.0 - (1.0 + 0.6 * (1.0 - std::exp(-2.0)));
    EXPECT_NEAR(hawkes::full_loglik(p, h), expected, 1e-14);
}

TEST(FullLoglik, RecursionAgreesWithDirectSum) {
    hawkes::RngStream rng(23);
    const auto p = exp_params(1.5, 0.7, 0.4);
    std::vector<double> times;
    double t = 0.0;
    for (int i = 0; i < 60; ++i) times.push_back(t += rng.exponential(2.0));
    const EventHistory h(times, times.back() + 1.0);

    double sum_log = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double lambda = p.nu;
        for (std::size_t j = 0; j < i; ++j) lambda += p.kernel.density(times[i] - times[j]);
        sum_log += std::log(lambda);
    }
    double compensator = p.nu * h.horizon;
    for (double tau : times) compensator += p.kernel.integral(h.horizon - tau);

    EXPECT_NEAR(hawkes::full_loglik(p, h), sum_log - compensator, 1e-10);
}

TEST(Transforms, CanonicalValuesAndRoundTrips) {
    const HawkesParams unit(1.0, ExcitationKernel::exponential(0.5, 1.0));
    const auto x = hawkes::to_transformed(unit);
    ASSERT_EQ(x.size(), 3u);
    EXPECT_NEAR(x[0], 0.0, 1e-15);
    EXPECT_NEAR(x[1], 0.0, 1e-15);
    EXPECT_NEAR(x[2], 0.0, 1e-15);

    const auto p = exp_params();
    const auto back = hawkes::from_transformed(KernelFamily::exponential, hawkes::to_transformed(p));
    EXPECT_NEAR(back.nu, 2.0, 1e-12);
    EXPECT_NEAR(back.kernel.eta(), 0.6, 1e-12);
    EXPECT_NEAR(back.kernel.scale(), 0.25, 1e-12);

    const std::vector<double> zeros{0.0, 0.0, 0.0, 0.0};
    const auto gamma = hawkes::from_transformed(KernelFamily::gamma, zeros);
    EXPECT_EQ(gamma.nu, 1.0);
    EXPECT_EQ(gamma.kernel.eta(), 0.5);
    EXPECT_EQ(gamma.kernel.shape(), 1.0);
    EXPECT_EQ(gamma.kernel.scale(), 1.0);
}

TEST(Transforms, IdentityOnTransformedSpace) {
    hawkes::RngStream rng(31);
    for (int i = 0; i < 40; ++i) {
        const bool four = i % 2 == 0;
        const KernelFamily family = four ? KernelFamily::weibull : KernelFamily::exponential;
        std::vector<double> x(hawkes::transformed_dim(family));
        for (double& v : x) v = 6.0 * (rng.uniform() - 0.5);
        const auto round = hawkes::to_transformed(hawkes::from_transformed(family, x));
        ASSERT_EQ(round.size(), x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            EXPECT_NEAR(round[k], x[k], 1e-12 * std::max(1.0, std::abs(x[k])));
        }
    }
}

TEST(Transforms, ExtremeInputsStillYieldValidParameters) {
    for (double big : {-800.0, -50.0, 50.0, 800.0}) {
        const std::vector<double> x{big, big, big};
        const auto p = hawkes::from_transformed(KernelFamily::exponential, x);
        EXPECT_GT(p.nu, 0.0);
        EXPECT_TRUE(std::isfinite(p.nu));
        EXPECT_GT(p.kernel.eta(), 0.0);
        EXPECT_LT(p.kernel.eta(), 1.0);
        EXPECT_GT(p.kernel.scale(), 0.0);
    }
    EXPECT_THROW((void)hawkes::from_transformed(KernelFamily::gamma, std::vector<double>{0.0, 0.0, 0.0}),
                 std::invalid_argument);
}

TEST(DomainTypes, ValidationErrors) {
    EXPECT_THROW((void)HawkesParams(0.0, ExcitationKernel::exponential(0.5, 1.0)),
                 std::invalid_argument);
    EXPECT_THROW((void)EventHistory({1.0, 1.0}, 2.0), std::invalid_argument);
    EXPECT_THROW((void)EventHistory({-0.5}, 2.0), std::invalid_argument);
    EXPECT_THROW((void)EventHistory({3.0}, 2.0), std::invalid_argument);
    EXPECT_THROW((void)CountData({0.0, 1.0}, {-1}), std::invalid_argument);
    EXPECT_THROW((void)CountData({0.0, 1.0, 1.0}, {1, 2}), std::invalid_argument);
    EXPECT_THROW((void)CountData({-1.0, 1.0}, {1}), std::invalid_argument);
    EXPECT_THROW((void)CountData({0.0}, {}), std::invalid_argument);

    const CountData data({0.0, 1.0, 2.5}, {2, 3});
    EXPECT_EQ(data.num_intervals(), 2);
    EXPECT_EQ(data.total_count(), 5);
    EXPECT_EQ(data.cumulative(), (std::vector<long>{2, 5}));
    EXPECT_EQ(data.horizon(), 2.5);
}

}  // namespace
