#pragma once

#include "ergocap/channel.hpp"
#include "ergocap/quadrature.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace ergocap {

/// Raised when an adaptive integral misses its tolerance within budget.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}
    double error_estimate() const { return error_estimate_; }

private:
    double error_estimate_;
};

/// [x]*: identity on x >= 0, +inf for x < 0.
constexpr double clip_star(double x) {
    return x < 0.0 ? std::numeric_limits<double>::infinity() : x;
}

struct CrossArgument {
    double value = 0.0;
    /// Denominator was exactly zero; value is +inf.
    bool singular = false;
};

/// Threshold gain on user k below which user i (with gain h) out-bids k at
/// interference level z:
///   x = 2 lam_k h (sigma2 + z) / (2 lam_i (sigma2 + z) + (mu_k - mu_i) h).
/// Negative x means user i wins against every k.
CrossArgument cross_argument(std::size_t i, std::size_t k, double h, double z,
                             const RateAwardVector& mu, const LambdaVector& lam, double sigma2);

/// Gain h* where the cross_argument denominator changes sign; present only
/// when mu_k < mu_i.
std::optional<double> case_boundary(std::size_t i, std::size_t k, double z,
                                    const RateAwardVector& mu, const LambdaVector& lam,
                                    double sigma2);

/// Smallest gain for which user i has positive marginal utility at z,
/// 2 lam_i (sigma2 + z) / mu_i.
double positivity_threshold(std::size_t i, double z, const RateAwardVector& mu,
                            const LambdaVector& lam, double sigma2);

/// Pr(u_i(z) > u_k(z) | h_i = h) as evaluated under `mode`.
double cross_factor(const FadingDistribution& other, const CrossArgument& x, CdfMode mode);

/// Product over k != i of cross_factor: the conditional probability that
/// user i beats every other user at (h, z).
double competition_factor(std::size_t i, double h, double z, const RateAwardVector& mu,
                          const LambdaVector& lam, const ChannelConfig& channel, CdfMode mode);

enum class InnerWeight {
    WinProbability,  ///< integrand f_i(h) * product
    TransmitPower,   ///< integrand f_i(h) / h * product
};

/// Inner h-integral from the positivity threshold to the fading tail point,
/// cut at every case boundary and pdf/CDF kink.
IntegrationResult inner_integral(InnerWeight weight, std::size_t i, double z,
                                 const RateAwardVector& mu, const LambdaVector& lam,
                                 const ChannelConfig& channel, CdfMode mode, double tol,
                                 double tail_eps = 1e-12, std::size_t max_evals = 250000);

/// P(i, z): probability that user i has the strictly largest positive
/// marginal utility at interference level z.
double win_probability(std::size_t i, double z, const RateAwardVector& mu,
                       const LambdaVector& lam, const ChannelConfig& channel, CdfMode mode,
                       double tol = 1e-9);

/// P(i, z) / (2 (sigma2 + z)).
double rate_integrand(std::size_t i, double z, const RateAwardVector& mu,
                      const LambdaVector& lam, const ChannelConfig& channel, CdfMode mode,
                      double tol = 1e-9);

/// Inner integral of f_i(h) / h * product: transmit power density at z.
double power_integrand(std::size_t i, double z, const RateAwardVector& mu,
                       const LambdaVector& lam, const ChannelConfig& channel, CdfMode mode,
                       double tol = 1e-9);

/// Interference level beyond which P(i, z) <= tail_eps; negative when user
/// i essentially never transmits.
double outer_truncation(std::size_t i, const RateAwardVector& mu, const LambdaVector& lam,
                        const ChannelConfig& channel, double tail_eps);

enum class OuterQuantity {
    Rate,   ///< integral of rate_integrand over z
    Power,  ///< integral of power_integrand over z
};

/// Full double integral for user i. error_estimate covers the outer rule
/// plus the propagated inner tolerance. Throws NumericError on failure.
IntegrationResult outer_integral(OuterQuantity quantity, std::size_t i, const RateAwardVector& mu,
                                 const LambdaVector& lam, const ChannelConfig& channel,
                                 CdfMode mode, const QuadratureSettings& quad);

}  // namespace ergocap
