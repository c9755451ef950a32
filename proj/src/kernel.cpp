#include "ergocap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ergocap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_indices(std::size_t i, const RateAwardVector& mu, const LambdaVector& lam) {
    if (mu.size() != lam.size()) throw std::invalid_argument("mu and lambda sizes differ");
    if (i >= mu.size()) throw std::out_of_range("user index out of range");
}

// Gains h at which the cross argument of pair (i, k) equals a CDF kink b of
// user k. Solving x(h) = b gives h = 2 b lam_i s / (2 lam_k s - b (mu_k - mu_i)).
void append_cdf_kinks(std::vector<double>& out, std::size_t i, std::size_t k, double s,
                      const RateAwardVector& mu, const LambdaVector& lam,
                      const FadingDistribution& other) {
    for (double b : other.pdf_breakpoints()) {
        if (!(b > 0.0)) continue;
        const double denom = 2.0 * lam[k] * s - b * (mu[k] - mu[i]);
        if (denom > 0.0) out.push_back(2.0 * b * lam[i] * s / denom);
    }
}

}  // namespace

CrossArgument cross_argument(std::size_t i, std::size_t k, double h, double z,
                             const RateAwardVector& mu, const LambdaVector& lam, double sigma2) {
    const double s = sigma2 + z;
    const double denom = 2.0 * lam[i] * s + (mu[k] - mu[i]) * h;
    if (denom == 0.0) return {kInf, true};
    return {2.0 * lam[k] * h * s / denom, false};
}

std::optional<double> case_boundary(std::size_t i, std::size_t k, double z,
                                    const RateAwardVector& mu, const LambdaVector& lam,
                                    double sigma2) {
    if (!(mu[k] < mu[i])) return std::nullopt;
    return 2.0 * lam[i] * (sigma2 + z) / (mu[i] - mu[k]);
}

double positivity_threshold(std::size_t i, double z, const RateAwardVector& mu,
                            const LambdaVector& lam, double sigma2) {
    return 2.0 * lam[i] * (sigma2 + z) / mu[i];
}

double cross_factor(const FadingDistribution& other, const CrossArgument& x, CdfMode mode) {
    if (x.value < 0.0) {
        return mode == CdfMode::Corrected ? other.cdf(clip_star(x.value)) : 0.0;
    }
    return other.cdf(x.value);
}

double competition_factor(std::size_t i, double h, double z, const RateAwardVector& mu,
                          const LambdaVector& lam, const ChannelConfig& channel, CdfMode mode) {
    double product = 1.0;
    for (std::size_t k = 0; k < channel.size(); ++k) {
        if (k == i) continue;
        product *= cross_factor(channel.users[k].fading,
                                cross_argument(i, k, h, z, mu, lam, channel.sigma2), mode);
        if (product == 0.0) break;
    }
    return product;
}

IntegrationResult inner_integral(InnerWeight weight, std::size_t i, double z,
                                 const RateAwardVector& mu, const LambdaVector& lam,
                                 const ChannelConfig& channel, CdfMode mode, double tol,
                                 double tail_eps, std::size_t max_evals) {
    check_indices(i, mu, lam);
    if (channel.size() != mu.size()) throw std::invalid_argument("channel and mu sizes differ");
    if (!(z >= 0.0)) throw std::domain_error("interference level z must be nonnegative");

    const auto& own = channel.users[i].fading;
    const double lower = positivity_threshold(i, z, mu, lam, channel.sigma2);
    const double upper = own.tail_point(tail_eps);
    if (!(upper > lower)) return {};

    const double s = channel.sigma2 + z;
    std::vector<double> cuts = own.pdf_breakpoints();
    for (std::size_t k = 0; k < channel.size(); ++k) {
        if (k == i) continue;
        if (auto hstar = case_boundary(i, k, z, mu, lam, channel.sigma2)) cuts.push_back(*hstar);
        append_cdf_kinks(cuts, i, k, s, mu, lam, channel.users[k].fading);
    }
    cuts = clean_breakpoints(std::move(cuts), lower, upper);

    auto integrand = [&](double h) {
        double density = own.pdf(h);
        if (density == 0.0) return 0.0;
        if (weight == InnerWeight::TransmitPower) density /= h;
        return density * competition_factor(i, h, z, mu, lam, channel, mode);
    };
    auto result = integrate_fn(integrand, lower, upper, cuts, tol, max_evals);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "inner integral for user " << i << " at z=" << z
            << " did not converge (error estimate " << result.error_estimate << ", tol " << tol << ")";
        throw NumericError(msg.str(), result.error_estimate);
    }
    return result;
}

double win_probability(std::size_t i, double z, const RateAwardVector& mu, const LambdaVector& lam,
                       const ChannelConfig& channel, CdfMode mode, double tol) {
    return inner_integral(InnerWeight::WinProbability, i, z, mu, lam, channel, mode, tol).value;
}

double rate_integrand(std::size_t i, double z, const RateAwardVector& mu, const LambdaVector& lam,
                      const ChannelConfig& channel, CdfMode mode, double tol) {
    return win_probability(i, z, mu, lam, channel, mode, tol) / (2.0 * (channel.sigma2 + z));
}

double power_integrand(std::size_t i, double z, const RateAwardVector& mu, const LambdaVector& lam,
                       const ChannelConfig& channel, CdfMode mode, double tol) {
    return inner_integral(InnerWeight::TransmitPower, i, z, mu, lam, channel, mode, tol).value;
}

double outer_truncation(std::size_t i, const RateAwardVector& mu, const LambdaVector& lam,
                        const ChannelConfig& channel, double tail_eps) {
    check_indices(i, mu, lam);
    const double tail = channel.users[i].fading.tail_point(tail_eps);
    return mu[i] * tail / (2.0 * lam[i]) - channel.sigma2;
}

IntegrationResult outer_integral(OuterQuantity quantity, std::size_t i, const RateAwardVector& mu,
                                 const LambdaVector& lam, const ChannelConfig& channel,
                                 CdfMode mode, const QuadratureSettings& quad) {
    const double zmax = outer_truncation(i, mu, lam, channel, quad.tail_eps);
    if (!(zmax > 0.0)) return {};

    // z where the positivity threshold or a case boundary crosses a pdf
    // discontinuity of user i.
    std::vector<double> cuts;
    for (double b : channel.users[i].fading.pdf_breakpoints()) {
        cuts.push_back(mu[i] * b / (2.0 * lam[i]) - channel.sigma2);
        for (std::size_t k = 0; k < channel.size(); ++k) {
            if (k != i && mu[k] < mu[i]) {
                cuts.push_back((mu[i] - mu[k]) * b / (2.0 * lam[i]) - channel.sigma2);
            }
        }
    }
    cuts = clean_breakpoints(std::move(cuts), 0.0, zmax);

    const InnerWeight weight =
        quantity == OuterQuantity::Rate ? InnerWeight::WinProbability : InnerWeight::TransmitPower;
    double worst_inner = 0.0;
    std::size_t inner_evals = 0;
    auto integrand = [&](double z) {
        const auto inner = inner_integral(weight, i, z, mu, lam, channel, mode, quad.inner_tol,
                                          quad.tail_eps, quad.max_evals);
        worst_inner = std::max(worst_inner, inner.error_estimate);
        inner_evals += inner.evals;
        if (quantity == OuterQuantity::Rate) return inner.value / (2.0 * (channel.sigma2 + z));
        return inner.value;
    };
    auto result = integrate_fn(integrand, 0.0, zmax, cuts, quad.outer_tol, quad.max_evals);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "outer integral for user " << i << " did not converge (error estimate "
            << result.error_estimate << ", tol " << quad.outer_tol << ")";
        throw NumericError(msg.str(), result.error_estimate);
    }
    // Inner errors integrated against the outer weight.
    const double weight_mass = quantity == OuterQuantity::Rate
                                   ? 0.5 * std::log1p(zmax / channel.sigma2)
                                   : zmax;
    result.error_estimate += worst_inner * weight_mass;
    result.evals += inner_evals;
    return result;
}

}  // namespace ergocap
