#include "ergocap/quadrature.hpp"

#include <stdexcept>

namespace ergocap {

IntegrationResult integrate(const IntegrationRequest& req) {
    if (!req.integrand) throw std::invalid_argument("integrate: empty integrand");
    if (!(req.truncation_point > req.lower)) {
        throw std::invalid_argument("integrate: truncation_point must exceed lower");
    }
    if (!(req.abs_tol > 0.0)) throw std::invalid_argument("integrate: abs_tol must be positive");
    if (!std::is_sorted(req.breakpoints.begin(), req.breakpoints.end())) {
        throw std::invalid_argument("integrate: breakpoints must be sorted");
    }
    return integrate_fn(req.integrand, req.lower, req.truncation_point, req.breakpoints,
                        req.abs_tol, req.max_evals);
}

std::vector<double> clean_breakpoints(std::vector<double> points, double lower, double upper) {
    std::erase_if(points, [&](double p) { return !(p > lower && p < upper); });
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

}  // namespace ergocap
