#pragma once

#include "ergocap/channel.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergocap {

struct SolverSettings {
    double power_rel_tol = 1e-6;
    int max_outer_iters = 200;
    double bracket_growth = 4.0;
    CdfMode mode = CdfMode::Corrected;
    QuadratureSettings quadrature;

    void validate() const;
    bool operator==(const SolverSettings&) const = default;
};

/// Average transmit power of user i at power prices `lam`: the double
/// integral over interference level z and gain h of f_i(h)/h times the
/// probability that i wins the slab.
double achieved_power(std::size_t i, const RateAwardVector& mu, const LambdaVector& lam,
                      const ChannelConfig& channel, CdfMode mode,
                      const QuadratureSettings& quad = {});

struct LambdaSolution {
    LambdaVector lambda;
    std::vector<double> achieved_powers;
    /// (achieved - pbar) / pbar, per user.
    std::vector<double> residuals;
    /// Residuals recomputed with quadrature tolerances divided by 10.
    std::vector<double> certified_residuals;
    /// Largest outer-integral error estimate seen in the certificate pass.
    double quad_error = 0.0;
    int sweeps = 0;
    std::size_t power_evaluations = 0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> last_lambda,
                std::vector<double> residuals)
        : std::runtime_error(what),
          last_lambda_(std::move(last_lambda)),
          residuals_(std::move(residuals)) {}
    const std::vector<double>& last_lambda() const { return last_lambda_; }
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> last_lambda_;
    std::vector<double> residuals_;
};

/// Finds the power prices meeting every average power constraint.
///
/// Gauss-Seidel sweeps over users; each coordinate is solved by bisection
/// in log(lambda_i), relying on achieved_power(i, .) decreasing in its own
/// price. A sweep that changes no coordinate ends the iteration. Throws
/// SolverError after max_outer_iters sweeps.
LambdaSolution solve_lambda(const RateAwardVector& mu, const ChannelConfig& channel,
                            const SolverSettings& settings,
                            const std::optional<LambdaVector>& initial = std::nullopt);

/// Cold-start bracket for lambda_i used when no initial iterate is given.
std::pair<double, double> initial_lambda_bracket(std::size_t i, const RateAwardVector& mu,
                                                 const ChannelConfig& channel);

}  // namespace ergocap
