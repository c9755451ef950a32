#pragma once

#include "ergocap/fading.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ergocap {

struct UserChannel {
    FadingDistribution fading;
    /// Long-term average transmit power constraint.
    double pbar = 1.0;
    bool operator==(const UserChannel&) const = default;
};

/// Gaussian multiaccess channel: noise variance and one fading law plus
/// power budget per user.
struct ChannelConfig {
    double sigma2 = 1.0;
    std::vector<UserChannel> users;

    std::size_t size() const { return users.size(); }
    /// Throws std::invalid_argument unless sigma2 > 0, M >= 1, all pbar > 0.
    void validate() const;
    bool operator==(const ChannelConfig&) const = default;
};

/// Rate award vector: 0 < mu_i <= 1, sum mu_i = 1 within 1e-12.
class RateAwardVector {
public:
    explicit RateAwardVector(std::vector<double> mu);
    /// Divides by the sum first; for grids built in floating point.
    static RateAwardVector normalized(std::vector<double> weights);

    std::size_t size() const { return mu_.size(); }
    double operator[](std::size_t i) const { return mu_[i]; }
    std::span<const double> values() const { return mu_; }
    bool operator==(const RateAwardVector&) const = default;

private:
    std::vector<double> mu_;
};

/// Lagrange power prices, all strictly positive.
class LambdaVector {
public:
    explicit LambdaVector(std::vector<double> lambda);

    std::size_t size() const { return lambda_.size(); }
    double operator[](std::size_t i) const { return lambda_[i]; }
    std::span<const double> values() const { return lambda_; }
    /// Returns a copy with coordinate i replaced.
    LambdaVector with(std::size_t i, double value) const;
    bool operator==(const LambdaVector&) const = default;

private:
    std::vector<double> lambda_;
};

/// How a negative cross-user CDF argument is evaluated.
enum class CdfMode {
    Corrected,  ///< F(+inf) = 1
    NaiveZero,  ///< treated as 0
};

std::string_view to_string(CdfMode mode);
CdfMode parse_cdf_mode(std::string_view text);

/// Tolerances shared by the nested integrals.
struct QuadratureSettings {
    double outer_tol = 1e-8;
    double inner_tol = 1e-9;
    double tail_eps = 1e-12;
    std::size_t max_evals = 250000;

    /// Same settings with both tolerances divided by `factor`.
    QuadratureSettings tightened(double factor) const;
    bool operator==(const QuadratureSettings&) const = default;
};

}  // namespace ergocap
