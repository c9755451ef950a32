#include "doctest.h"

#include "ergocap/boundary.hpp"
#include "ergocap/kernel.hpp"
#include "ergocap/montecarlo.hpp"
#include "ergocap/solver.hpp"

#include <cmath>
#include <random>

using namespace ergocap;

namespace {

ChannelConfig mixed_users() {
    return ChannelConfig{0.8,
                         {{FadingDistribution::exponential(1.0), 1.0},
                          {FadingDistribution::uniform(0.2, 2.5), 0.7},
                          {FadingDistribution::empirical({{0.0, 0.0}, {0.5, 0.3}, {1.5, 0.8}, {4.0, 1.0}}), 1.5}}};
}

double z_max(const WinnerPartition& p) { return p.intervals.empty() ? 0.0 : p.intervals.back().z_hi; }

}  // namespace

TEST_CASE("utility examples") {
    const RateAwardVector mu({0.5, 0.5});
    const LambdaVector lam({1.0, 1.0});
    CHECK(utility(0, 0.0, 2.0, mu, lam, 1.0) == doctest::Approx(-0.25));
    // Zero crossing at z = mu h / (2 lam) - sigma2.
    const double root = 0.5 * 8.0 / 2.0 - 1.0;
    CHECK(std::abs(utility(0, root, 8.0, mu, lam, 1.0)) < 1e-15);
    CHECK(utility(0, 0.5, 8.0, mu, lam, 1.0) > utility(0, 1.5, 8.0, mu, lam, 1.0));
}

TEST_CASE("partition examples") {
    {
        const auto p = winner_partition({{1.0, 1.0}}, RateAwardVector({0.5, 0.5}), LambdaVector({1.0, 2.0}), 0.1);
        REQUIRE(p.intervals.size() == 1);
        CHECK(p.intervals[0].winner == 0);
        CHECK(p.intervals[0].z_lo == 0.0);
        CHECK(p.intervals[0].z_hi == doctest::Approx(0.15));
        CHECK_FALSE(p.tie);
        const auto a = per_state_allocation(p, {{1.0, 1.0}}, 0.1);
        CHECK(a.rates[0] == doctest::Approx(0.5 * std::log(2.5)));
        CHECK(a.rates[0] == doctest::Approx(0.45815).epsilon(1e-5));
        CHECK(a.powers[0] == doctest::Approx(0.15));
        CHECK(a.rates[1] == 0.0);
        CHECK(a.powers[1] == 0.0);
    }
    {
        const auto p = winner_partition({{4.0}}, RateAwardVector({1.0}), LambdaVector({1.0}), 1.0);
        REQUIRE(p.intervals.size() == 1);
        CHECK(p.intervals[0] == WinnerInterval{0.0, 1.0, 0});
    }
    {
        const FadingState s{{0.1, 0.1}};
        const auto p = winner_partition(s, RateAwardVector({0.5, 0.5}), LambdaVector({1.0, 1.0}), 1.0);
        CHECK(p.intervals.empty());
        const auto a = per_state_allocation(p, s, 1.0);
        CHECK(a.rates == std::vector<double>{0.0, 0.0});
        CHECK(a.powers == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("exact ties go to the lowest index") {
    const auto p = winner_partition({{1.0, 1.0}}, RateAwardVector({0.5, 0.5}), LambdaVector({0.1, 0.1}), 1.0);
    CHECK(p.tie);
    REQUIRE(p.intervals.size() == 1);
    CHECK(p.intervals[0].winner == 0);
}

TEST_CASE("single user reduces to the Shannon formula") {
    // Water level 1/(2 lam): power 1/(2 lam) - sigma2/h, rate 1/2 ln(1 + h p / sigma2).
    const double h = 3.0, lam = 0.2, sigma2 = 0.5;
    const FadingState s{{h}};
    const auto a = per_state_allocation(winner_partition(s, RateAwardVector({1.0}), LambdaVector({lam}), sigma2), s, sigma2);
    const double p = 1.0 / (2 * lam) - sigma2 / h;
    CHECK(a.powers[0] == doctest::Approx(p).epsilon(1e-14));
    CHECK(a.rates[0] == doctest::Approx(0.5 * std::log(1.0 + h * p / sigma2)).epsilon(1e-14));
}

TEST_CASE("partition soundness and allocation identities on random states") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.05, 1.0), hd(0.01, 6.0), ld(0.02, 0.6);
    std::uniform_int_distribution<std::size_t> md(1, 5);
    for (int n = 0; n < 400; ++n) {
        const std::size_t m = md(gen);
        std::vector<double> w(m), l(m), h(m);
        for (std::size_t i = 0; i < m; ++i) {
            w[i] = u(gen);
            l[i] = ld(gen);
            h[i] = hd(gen);
        }
        const auto mu = RateAwardVector::normalized(w);
        const LambdaVector lam(l);
        const double sigma2 = 0.3 + u(gen);
        const FadingState s{h};
        const auto p = winner_partition(s, mu, lam, sigma2);

        std::vector<int> seen(m, 0);
        double prev_hi = 0.0;
        for (const auto& iv : p.intervals) {
            // Contiguous from zero, each user at most once.
            CHECK(iv.z_lo == prev_hi);
            CHECK(iv.z_hi > iv.z_lo);
            prev_hi = iv.z_hi;
            ++seen[iv.winner];
            for (double t : {0.1, 0.5, 0.9}) {
                const double z = iv.z_lo + t * (iv.z_hi - iv.z_lo);
                const double best = utility(iv.winner, z, h[iv.winner], mu, lam, sigma2);
                CHECK(best > 0.0);
                for (std::size_t k = 0; k < m; ++k) CHECK(utility(k, z, h[k], mu, lam, sigma2) <= best + 1e-12);
            }
        }
        for (int c : seen) CHECK(c <= 1);
        const double zmax = z_max(p);
        for (std::size_t k = 0; k < m; ++k) CHECK(utility(k, zmax * 1.0001 + 1e-9, h[k], mu, lam, sigma2) <= 1e-12);

        const auto a = per_state_allocation(p, s, sigma2);
        double received = 0.0, total_rate = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            received += h[i] * a.powers[i];
            total_rate += a.rates[i];
        }
        CHECK(received == doctest::Approx(zmax).epsilon(1e-12));
        CHECK(total_rate == doctest::Approx(0.5 * std::log1p(zmax / sigma2)).epsilon(1e-12));
        // Successive decoding: each user sees the interference stacked below it.
        for (const auto& iv : p.intervals) {
            const std::size_t i = iv.winner;
            CHECK(a.rates[i] == doctest::Approx(0.5 * std::log1p(h[i] * a.powers[i] / (sigma2 + iv.z_lo))).epsilon(1e-12));
        }
    }
}

TEST_CASE("a one-sample estimate is that sample's allocation") {
    const auto ch = mixed_users();
    const RateAwardVector mu({0.5, 0.3, 0.2});
    const LambdaVector lam({0.2, 0.15, 0.1});
    const auto est = estimate(ch, mu, lam, 1, 99);
    const auto s = draw_state(ch, 99, 0);
    const auto a = per_state_allocation(winner_partition(s, mu, lam, ch.sigma2), s, ch.sigma2);
    CHECK(est.samples == 1);
    CHECK(est.mean_rates == a.rates);
    CHECK(est.mean_powers == a.powers);
}

TEST_CASE("results do not depend on the thread count") {
    const auto ch = mixed_users();
    const RateAwardVector mu({0.5, 0.3, 0.2});
    const LambdaVector lam({0.2, 0.15, 0.1});
    const auto one = estimate(ch, mu, lam, 50000, 7, 1);
    const auto many = estimate(ch, mu, lam, 50000, 7, 8);
    CHECK(one.mean_rates == many.mean_rates);
    CHECK(one.rate_std_errors == many.rate_std_errors);
    CHECK(one.mean_powers == many.mean_powers);
    CHECK(one.power_std_errors == many.power_std_errors);
    const auto p1 = estimate_win_probability(ch, 1, 0.3, mu, lam, 50000, 7, 1);
    const auto p8 = estimate_win_probability(ch, 1, 0.3, mu, lam, 50000, 7, 8);
    CHECK(p1.estimate == p8.estimate);
}

TEST_CASE("win-probability estimates match the kernel") {
    {
        const ChannelConfig ch{1.0, {{FadingDistribution::exponential(1.0), 1.0}}};
        const auto p = estimate_win_probability(ch, 0, 0.0, RateAwardVector({1.0}), LambdaVector({1.0}), 200000, 3);
        CHECK(std::abs(p.estimate - std::exp(-2.0)) <= 3.0 * p.std_error);
    }
    const auto ch = mixed_users();
    const RateAwardVector mu({0.5, 0.3, 0.2});
    const LambdaVector lam({0.2, 0.15, 0.1});
    for (double z : {0.0, 0.4, 1.5}) {
        for (std::size_t i = 0; i < 3; ++i) {
            CAPTURE(z);
            CAPTURE(i);
            const double exact = win_probability(i, z, mu, lam, ch, CdfMode::Corrected);
            const auto p = estimate_win_probability(ch, i, z, mu, lam, 200000, 11);
            CHECK(std::abs(p.estimate - exact) <= 3.0 * p.std_error);
        }
    }
}

TEST_CASE("Monte Carlo means match analytic rates and power budgets") {
    const auto ch = mixed_users();
    const RateAwardVector mu({0.45, 0.35, 0.2});
    const auto sol = solve_lambda(mu, ch, SolverSettings{});
    const auto rp = rate_point(mu, sol.lambda, ch, CdfMode::Corrected);
    const auto est = estimate(ch, mu, sol.lambda, 200000, 2024);
    for (std::size_t i = 0; i < 3; ++i) {
        CAPTURE(i);
        CHECK(std::abs(est.mean_rates[i] - rp.rates[i]) <= 3.0 * est.rate_std_errors[i]);
        CHECK(std::abs(est.mean_powers[i] - ch.users[i].pbar) <= 3.0 * est.power_std_errors[i]);
    }
}

TEST_CASE("draws are reproducible and never zero") {
    const ChannelConfig ch{1.0, {{FadingDistribution::uniform(0.0, 1.0), 1.0}, {FadingDistribution::exponential(2.0), 1.0}}};
    for (std::uint64_t j = 0; j < 1000; ++j) {
        const auto a = draw_state(ch, 5, j);
        CHECK(a.h == draw_state(ch, 5, j).h);
        CHECK(a.h[0] > 0.0);
        CHECK(a.h[1] > 0.0);
    }
    CHECK(draw_state(ch, 5, 0).h != draw_state(ch, 6, 0).h);
}
