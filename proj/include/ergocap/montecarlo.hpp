#pragma once

#include "ergocap/channel.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ergocap {

/// One joint draw of all users' power gains.
struct FadingState {
    std::vector<double> h;
};

struct WinnerInterval {
    double z_lo = 0.0;
    double z_hi = 0.0;
    std::size_t winner = 0;
    bool operator==(const WinnerInterval&) const = default;
};

/// Interference levels [0, z_max] split by which user has the strictly
/// largest positive marginal utility.
struct WinnerPartition {
    std::vector<WinnerInterval> intervals;
    /// Some elementary interval had an exact utility tie (lowest index won).
    bool tie = false;
};

struct Allocation {
    std::vector<double> rates;
    std::vector<double> powers;
};

/// mu_i / (2 (sigma2 + z)) - lam_i / h_i.
double utility(std::size_t i, double z, double h_i, const RateAwardVector& mu,
               const LambdaVector& lam, double sigma2);

WinnerPartition winner_partition(const FadingState& state, const RateAwardVector& mu,
                                 const LambdaVector& lam, double sigma2);

/// Rate 1/2 ln((sigma2 + z_hi)/(sigma2 + z_lo)) and transmit power
/// (z_hi - z_lo)/h per interval, summed per user.
Allocation per_state_allocation(const WinnerPartition& partition, const FadingState& state,
                                double sigma2);

/// Fading state of sample `index` in the run seeded by `seed`. Each sample
/// owns counter-based substream `index`.
FadingState draw_state(const ChannelConfig& channel, std::uint64_t seed, std::uint64_t index);

struct MonteCarloEstimate {
    std::size_t samples = 0;
    std::vector<double> mean_rates;
    std::vector<double> rate_std_errors;
    std::vector<double> mean_powers;
    std::vector<double> power_std_errors;
};

/// Sample means and standard errors of the per-state allocation. Results
/// are bit-identical for any thread count.
MonteCarloEstimate estimate(const ChannelConfig& channel, const RateAwardVector& mu,
                            const LambdaVector& lam, std::size_t n_samples, std::uint64_t seed,
                            unsigned threads = 1);

struct ProbabilityEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Fraction of states in which user i strictly wins with positive utility
/// at interference level z.
ProbabilityEstimate estimate_win_probability(const ChannelConfig& channel, std::size_t i, double z,
                                             const RateAwardVector& mu, const LambdaVector& lam,
                                             std::size_t n_samples, std::uint64_t seed,
                                             unsigned threads = 1);

}  // namespace ergocap
