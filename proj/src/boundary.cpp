#include "ergocap/boundary.hpp"

#include "ergocap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace ergocap {

RatePoint rate_point(const RateAwardVector& mu, const LambdaVector& lam, const ChannelConfig& channel,
                     CdfMode mode, const QuadratureSettings& quad) {
    channel.validate();
    if (mu.size() != channel.size() || lam.size() != channel.size()) {
        throw std::invalid_argument("rate_point: mu/lambda sizes differ from user count");
    }
    RatePoint out;
    for (std::size_t i = 0; i < channel.size(); ++i) {
        const auto r = outer_integral(OuterQuantity::Rate, i, mu, lam, channel, mode, quad);
        out.rates.push_back(r.value);
        out.error_estimates.push_back(r.error_estimate);
    }
    return out;
}

std::vector<RateAwardVector> simplex_grid(std::size_t users, const MuGridSpec& spec) {
    if (users == 0) throw std::invalid_argument("simplex_grid: need at least one user");
    if (spec.resolution < 1) throw std::invalid_argument("simplex_grid: resolution must be >= 1");
    const double m = static_cast<double>(users);
    if (!(spec.mu_min > 0.0) || !(spec.mu_min * m < 1.0)) {
        throw std::invalid_argument("simplex_grid: need 0 < mu_min < 1/M");
    }
    if (users == 1) return {RateAwardVector({1.0})};

    const int n = spec.resolution;
    const double span = 1.0 - m * spec.mu_min;
    std::vector<RateAwardVector> grid;
    std::vector<int> k(users, 0);
    // Enumerate compositions of n with k_1 descending.
    std::function<void(std::size_t, int)> fill = [&](std::size_t pos, int remaining) {
        if (pos + 1 == users) {
            k[pos] = remaining;
            std::vector<double> mu(users);
            for (std::size_t i = 0; i < users; ++i) mu[i] = spec.mu_min + span * k[i] / n;
            grid.push_back(RateAwardVector::normalized(std::move(mu)));
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            k[pos] = v;
            fill(pos + 1, remaining - v);
        }
    };
    fill(0, n);
    return grid;
}

BoundaryPoint boundary_point(const RateAwardVector& mu, const ChannelConfig& channel,
                             const SolverSettings& settings,
                             const std::optional<LambdaVector>& warm_start) {
    BoundaryPoint point{mu, std::nullopt, {}, {}, settings.mode, 0.0, 0, "ok"};
    try {
        const auto solution = solve_lambda(mu, channel, settings, warm_start);
        const auto rates = rate_point(mu, solution.lambda, channel, settings.mode, settings.quadrature);
        point.lambda = solution.lambda;
        point.rates = rates.rates;
        point.achieved_powers = solution.achieved_powers;
        point.solver_iterations = solution.sweeps;
        point.quad_error = solution.quad_error;
        for (double e : rates.error_estimates) point.quad_error = std::max(point.quad_error, e);
    } catch (const SolverError& e) {
        point.status = std::string("solver: ") + e.what();
    } catch (const NumericError& e) {
        point.status = std::string("quadrature: ") + e.what();
    }
    return point;
}

std::vector<BoundaryPoint> sweep(const ChannelConfig& channel, const std::vector<RateAwardVector>& grid,
                                 const SolverSettings& settings) {
    std::vector<BoundaryPoint> out;
    out.reserve(grid.size());
    std::optional<LambdaVector> warm;
    for (const auto& mu : grid) {
        out.push_back(boundary_point(mu, channel, settings, warm));
        if (out.back().ok()) warm = out.back().lambda;
    }
    return out;
}

ModeComparison compare_modes(const ChannelConfig& channel, const RateAwardVector& mu,
                             const SolverSettings& settings) {
    SolverSettings corrected = settings;
    corrected.mode = CdfMode::Corrected;
    SolverSettings naive = settings;
    naive.mode = CdfMode::NaiveZero;

    const auto lam_c = solve_lambda(mu, channel, corrected).lambda;
    const auto lam_n = solve_lambda(mu, channel, naive, lam_c).lambda;
    const auto rc = rate_point(mu, lam_c, channel, CdfMode::Corrected, settings.quadrature);
    const auto rn_same = rate_point(mu, lam_c, channel, CdfMode::NaiveZero, settings.quadrature);
    const auto rn_e2e = rate_point(mu, lam_n, channel, CdfMode::NaiveZero, settings.quadrature);

    auto relative = [](double gap, double ref) { return ref != 0.0 ? gap / ref : 0.0; };
    ModeComparison cmp{mu, lam_c, lam_n, {}};
    for (std::size_t i = 0; i < channel.size(); ++i) {
        UserGap g;
        g.corrected_rate = rc.rates[i];
        g.naive_rate_same_lambda = rn_same.rates[i];
        g.same_lambda_abs_gap = rc.rates[i] - rn_same.rates[i];
        g.same_lambda_rel_gap = relative(g.same_lambda_abs_gap, rc.rates[i]);
        g.naive_rate_end_to_end = rn_e2e.rates[i];
        g.end_to_end_abs_gap = rc.rates[i] - rn_e2e.rates[i];
        g.end_to_end_rel_gap = relative(g.end_to_end_abs_gap, rc.rates[i]);
        cmp.users.push_back(g);
    }
    return cmp;
}

}  // namespace ergocap
