#include "ergocap/solver.hpp"

#include "ergocap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ergocap {

namespace {

// A sweep leaves a coordinate alone when its residual is within this share
// of the tolerance, and a 1-D solve aims for kTargetShare. The gap keeps the
// final residuals inside the tolerance after the other coordinates move and
// after the tighter certificate quadrature.
constexpr double kPassShare = 0.5;
constexpr double kTargetShare = 0.1;
constexpr int kMaxExpansions = 64;
constexpr int kMaxBisections = 200;

struct CoordinateResult {
    double lambda;
    std::size_t evaluations;
};

class CoordinateSolver {
public:
    CoordinateSolver(std::size_t i, const RateAwardVector& mu, const ChannelConfig& channel,
                     const SolverSettings& settings)
        : i_(i), mu_(mu), channel_(channel), settings_(settings),
          pbar_(channel.users[i].pbar),
          target_(kTargetShare * settings.power_rel_tol * pbar_) {}

    // Solves achieved_power(i) = pbar along log(lambda_i), others fixed.
    // `residual0` is achieved - pbar at the current iterate.
    CoordinateResult solve(const LambdaVector& lam, double residual0, bool cold) {
        evaluations_ = 0;
        lam_ = &lam;
        const double x0 = std::log(lam[i_]);
        const double growth = std::log(settings_.bracket_growth);
        double step = cold ? growth : std::clamp(2.0 * std::abs(residual0) / pbar_, 1e-9, growth);
        // Residual is decreasing in lambda: positive residual means raise it.
        const double dir = residual0 > 0.0 ? 1.0 : -1.0;

        double near = x0;     // residual has the sign of residual0
        double far = x0;      // residual has the opposite sign
        double best_x = x0;
        double best_abs = std::abs(residual0);
        bool bracketed = false;
        for (int n = 0; n < kMaxExpansions; ++n) {
            const double x = near + dir * step;
            const double r = residual(x);
            if (std::abs(r) < best_abs) {
                best_abs = std::abs(r);
                best_x = x;
            }
            if (std::abs(r) <= target_) return {std::exp(x), evaluations_};
            if ((r > 0.0) == (residual0 > 0.0)) {
                near = x;
                step *= settings_.bracket_growth;
            } else {
                far = x;
                bracketed = true;
                break;
            }
        }
        if (!bracketed) {
            std::ostringstream msg;
            msg << "could not bracket lambda for user " << i_ << " (last log-lambda " << near << ")";
            throw SolverError(msg.str(), {lam.values().begin(), lam.values().end()}, {residual0});
        }

        double lo = std::min(near, far), hi = std::max(near, far);
        for (int n = 0; n < kMaxBisections && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++n) {
            const double mid = 0.5 * (lo + hi);
            const double r = residual(mid);
            if (std::abs(r) < best_abs) {
                best_abs = std::abs(r);
                best_x = mid;
            }
            if (std::abs(r) <= target_) return {std::exp(mid), evaluations_};
            if (r > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Quadrature noise can floor the residual; the outer sweep decides.
        return {std::exp(best_x), evaluations_};
    }

private:
    double residual(double log_lambda) {
        ++evaluations_;
        const auto trial = lam_->with(i_, std::exp(log_lambda));
        return achieved_power(i_, mu_, trial, channel_, settings_.mode, settings_.quadrature) - pbar_;
    }

    std::size_t i_;
    const RateAwardVector& mu_;
    const ChannelConfig& channel_;
    const SolverSettings& settings_;
    double pbar_;
    double target_;
    const LambdaVector* lam_ = nullptr;
    std::size_t evaluations_ = 0;
};

}  // namespace

void SolverSettings::validate() const {
    if (!(power_rel_tol > 0.0)) throw std::invalid_argument("solver: power_rel_tol must be positive");
    if (max_outer_iters < 1) throw std::invalid_argument("solver: max_outer_iters must be >= 1");
    if (!(bracket_growth > 1.0)) throw std::invalid_argument("solver: bracket_growth must exceed 1");
    if (!(quadrature.outer_tol > 0.0) || !(quadrature.inner_tol > 0.0)) {
        throw std::invalid_argument("quadrature: tolerances must be positive");
    }
    if (!(quadrature.tail_eps > 0.0 && quadrature.tail_eps < 1.0)) {
        throw std::invalid_argument("quadrature: tail_eps must lie in (0, 1)");
    }
}

double achieved_power(std::size_t i, const RateAwardVector& mu, const LambdaVector& lam,
                      const ChannelConfig& channel, CdfMode mode, const QuadratureSettings& quad) {
    return outer_integral(OuterQuantity::Power, i, mu, lam, channel, mode, quad).value;
}

std::pair<double, double> initial_lambda_bracket(std::size_t i, const RateAwardVector& mu,
                                                 const ChannelConfig& channel) {
    const auto& fading = channel.users[i].fading;
    const double q01 = fading.quantile(0.01);
    const double q99 = fading.quantile(0.99);
    const double scale = mu[i] / (2.0 * channel.sigma2);
    // Uniform laws starting at 0 have q01 close to 0; keep the bracket positive.
    const double lo = scale * std::max(q01, 1e-3 * q99) * 1e-3;
    return {lo, scale * q99 * 1e3};
}

LambdaSolution solve_lambda(const RateAwardVector& mu, const ChannelConfig& channel,
                            const SolverSettings& settings,
                            const std::optional<LambdaVector>& initial) {
    channel.validate();
    settings.validate();
    const std::size_t m = channel.size();
    if (mu.size() != m) throw std::invalid_argument("solve_lambda: mu size differs from user count");

    std::vector<bool> cold(m, !initial.has_value());
    LambdaVector lam = [&] {
        if (initial) {
            if (initial->size() != m) throw std::invalid_argument("solve_lambda: initial lambda size");
            return *initial;
        }
        std::vector<double> start(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto [lo, hi] = initial_lambda_bracket(i, mu, channel);
            start[i] = std::sqrt(lo * hi);
        }
        return LambdaVector(std::move(start));
    }();

    LambdaSolution out{lam, std::vector<double>(m), std::vector<double>(m), {}, 0.0, 0, 0};
    for (int sweep = 1; sweep <= settings.max_outer_iters; ++sweep) {
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            const double pbar = channel.users[i].pbar;
            const double power = achieved_power(i, mu, lam, channel, settings.mode, settings.quadrature);
            ++out.power_evaluations;
            out.achieved_powers[i] = power;
            out.residuals[i] = (power - pbar) / pbar;
            if (std::abs(out.residuals[i]) <= kPassShare * settings.power_rel_tol) continue;

            CoordinateSolver coordinate(i, mu, channel, settings);
            const auto step = coordinate.solve(lam, power - pbar, cold[i]);
            out.power_evaluations += step.evaluations;
            lam = lam.with(i, step.lambda);
            cold[i] = false;
            changed = true;
        }
        out.sweeps = sweep;
        if (!changed) {
            out.lambda = lam;
            const auto fine = settings.quadrature.tightened(10.0);
            out.certified_residuals.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const auto r = outer_integral(OuterQuantity::Power, i, mu, lam, channel, settings.mode, fine);
                const double pbar = channel.users[i].pbar;
                out.certified_residuals[i] = (r.value - pbar) / pbar;
                out.quad_error = std::max(out.quad_error, r.error_estimate);
            }
            return out;
        }
    }
    std::ostringstream msg;
    msg << "lambda solve did not converge in " << settings.max_outer_iters << " sweeps";
    throw SolverError(msg.str(), {lam.values().begin(), lam.values().end()}, out.residuals);
}

}  // namespace ergocap
