#include "ergocap/channel.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ergocap {

void ChannelConfig::validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw std::invalid_argument("channel: sigma2 must be positive and finite");
    }
    if (users.empty()) throw std::invalid_argument("channel: at least one user required");
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!(users[i].pbar > 0.0) || !std::isfinite(users[i].pbar)) {
            throw std::invalid_argument("channel: users[" + std::to_string(i) +
                                        "].pbar must be positive and finite");
        }
    }
}

RateAwardVector::RateAwardVector(std::vector<double> mu) : mu_(std::move(mu)) {
    if (mu_.empty()) throw std::invalid_argument("mu: empty rate award vector");
    for (std::size_t i = 0; i < mu_.size(); ++i) {
        if (!(mu_[i] > 0.0 && mu_[i] <= 1.0)) {
            std::ostringstream msg;
            msg << "mu[" << i << "] = " << mu_[i] << " outside (0, 1]";
            throw std::invalid_argument(msg.str());
        }
    }
    const double sum = std::accumulate(mu_.begin(), mu_.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mu: entries must sum to 1, got " << sum;
        throw std::invalid_argument(msg.str());
    }
}

RateAwardVector RateAwardVector::normalized(std::vector<double> weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw std::invalid_argument("mu: weights must have positive sum");
    for (auto& w : weights) w /= sum;
    return RateAwardVector(std::move(weights));
}

LambdaVector::LambdaVector(std::vector<double> lambda) : lambda_(std::move(lambda)) {
    if (lambda_.empty()) throw std::invalid_argument("lambda: empty vector");
    for (std::size_t i = 0; i < lambda_.size(); ++i) {
        if (!(lambda_[i] > 0.0) || !std::isfinite(lambda_[i])) {
            std::ostringstream msg;
            msg << "lambda[" << i << "] = " << lambda_[i] << " must be positive and finite";
            throw std::invalid_argument(msg.str());
        }
    }
}

LambdaVector LambdaVector::with(std::size_t i, double value) const {
    auto copy = lambda_;
    copy.at(i) = value;
    return LambdaVector(std::move(copy));
}

std::string_view to_string(CdfMode mode) {
    return mode == CdfMode::Corrected ? "corrected" : "naive";
}

CdfMode parse_cdf_mode(std::string_view text) {
    if (text == "corrected") return CdfMode::Corrected;
    if (text == "naive") return CdfMode::NaiveZero;
    throw std::invalid_argument("unknown cdf mode '" + std::string(text) + "' (corrected|naive)");
}

QuadratureSettings QuadratureSettings::tightened(double factor) const {
    QuadratureSettings q = *this;
    q.outer_tol /= factor;
    q.inner_tol /= factor;
    return q;
}

}  // namespace ergocap
