#pragma once

#include "ergocap/channel.hpp"
#include "ergocap/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ergocap {

struct RatePoint {
    /// Per-user ergodic rates in nats per real dimension.
    std::vector<double> rates;
    /// Per-user outer-integral error estimates (inner errors included).
    std::vector<double> error_estimates;
};

/// Rates of every user at fixed power prices.
RatePoint rate_point(const RateAwardVector& mu, const LambdaVector& lam,
                     const ChannelConfig& channel, CdfMode mode, const QuadratureSettings& quad = {});

struct BoundaryPoint {
    RateAwardVector mu;
    std::optional<LambdaVector> lambda;
    std::vector<double> rates;
    std::vector<double> achieved_powers;
    CdfMode mode = CdfMode::Corrected;
    /// Largest quadrature error estimate over the rate and certificate passes.
    double quad_error = 0.0;
    int solver_iterations = 0;
    /// "ok", or the failure message of this grid point.
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

/// Uniform simplex lattice with a margin: mu_i = mu_min + (1 - M mu_min) k_i / n
/// over all nonnegative integer k with sum n. Points are ordered
/// lexicographically by k, descending in k_1.
struct MuGridSpec {
    int resolution = 10;
    double mu_min = 1e-3;
    bool operator==(const MuGridSpec&) const = default;
};

std::vector<RateAwardVector> simplex_grid(std::size_t users, const MuGridSpec& spec);

/// Solves and evaluates one point end to end.
BoundaryPoint boundary_point(const RateAwardVector& mu, const ChannelConfig& channel,
                             const SolverSettings& settings,
                             const std::optional<LambdaVector>& warm_start = std::nullopt);

/// Boundary points for every grid point, warm-starting each solve from the
/// previous successful point. Failures are recorded in the point's status.
std::vector<BoundaryPoint> sweep(const ChannelConfig& channel, const std::vector<RateAwardVector>& grid,
                                 const SolverSettings& settings);

struct UserGap {
    double corrected_rate = 0.0;
    /// NaiveZero rates at the corrected power prices.
    double naive_rate_same_lambda = 0.0;
    double same_lambda_abs_gap = 0.0;
    double same_lambda_rel_gap = 0.0;
    /// NaiveZero rates at NaiveZero-solved power prices.
    double naive_rate_end_to_end = 0.0;
    double end_to_end_abs_gap = 0.0;
    double end_to_end_rel_gap = 0.0;
};

struct ModeComparison {
    RateAwardVector mu;
    LambdaVector corrected_lambda;
    LambdaVector naive_lambda;
    std::vector<UserGap> users;
};

/// Corrected minus naive rates, both at the corrected prices and with each
/// mode solving its own prices. `settings.mode` is ignored.
ModeComparison compare_modes(const ChannelConfig& channel, const RateAwardVector& mu,
                             const SolverSettings& settings);

}  // namespace ergocap
