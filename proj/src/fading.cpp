#include "ergocap/fading.hpp"

#include "ergocap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ergocap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonnegative(double h, const char* what) {
    if (std::isnan(h) || h < 0.0) {
        std::ostringstream msg;
        msg << what << ": gain must be nonnegative, got " << h;
        throw std::domain_error(msg.str());
    }
}

// Index j of the segment [knots[j], knots[j+1]) containing h, for h inside
// the knot range.
std::size_t segment_of(const std::vector<CdfKnot>& knots, double h) {
    auto it = std::upper_bound(knots.begin(), knots.end(), h,
                               [](double v, const CdfKnot& k) { return v < k.h; });
    return static_cast<std::size_t>(std::distance(knots.begin(), it)) - 1;
}

}  // namespace

FadingDistribution FadingDistribution::exponential(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("exponential fading: mean gain must be positive and finite");
    }
    return FadingDistribution(ExponentialGain{mean});
}

FadingDistribution FadingDistribution::uniform(double lower, double upper) {
    if (!(lower >= 0.0) || !(upper > lower) || !std::isfinite(upper)) {
        throw std::invalid_argument("uniform fading: need 0 <= lower < upper < inf");
    }
    return FadingDistribution(UniformGain{lower, upper});
}

FadingDistribution FadingDistribution::empirical(std::vector<CdfKnot> knots) {
    if (knots.size() < 2) {
        throw std::invalid_argument("empirical fading: need at least two knots");
    }
    if (!(knots.front().h >= 0.0)) {
        throw std::invalid_argument("empirical fading: knots must lie in h >= 0");
    }
    if (knots.front().F != 0.0 || knots.back().F != 1.0) {
        throw std::invalid_argument("empirical fading: first knot must have F=0 and last F=1");
    }
    for (std::size_t j = 1; j < knots.size(); ++j) {
        if (!(knots[j].h > knots[j - 1].h) || !std::isfinite(knots[j].h)) {
            throw std::invalid_argument("empirical fading: knot gains must be strictly increasing");
        }
        if (!(knots[j].F >= knots[j - 1].F)) {
            throw std::invalid_argument("empirical fading: knot CDF values must be nondecreasing");
        }
    }
    return FadingDistribution(PiecewiseLinearEmpirical{std::move(knots)});
}

FadingDistribution FadingDistribution::empirical_from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("empirical fading: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empirical fading: empty file " + path.string());
    }
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line != "h,F") {
        throw std::invalid_argument("empirical fading: expected header 'h,F' in " + path.string());
    }
    std::vector<CdfKnot> knots;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("empirical fading: " + path.string() + ":" +
                                        std::to_string(line_no) + ": expected two columns");
        }
        try {
            knots.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::logic_error&) {
            throw std::invalid_argument("empirical fading: " + path.string() + ":" +
                                        std::to_string(line_no) + ": malformed number");
        }
    }
    return empirical(std::move(knots));
}

FadingKind FadingDistribution::kind() const {
    return std::visit(overloaded{[](const ExponentialGain&) { return FadingKind::Exponential; },
                                 [](const UniformGain&) { return FadingKind::Uniform; },
                                 [](const PiecewiseLinearEmpirical&) { return FadingKind::Empirical; }},
                      params_);
}

double FadingDistribution::pdf(double h) const {
    require_nonnegative(h, "pdf");
    return std::visit(
        overloaded{[h](const ExponentialGain& e) { return std::exp(-h / e.mean) / e.mean; },
                   [h](const UniformGain& u) {
                       return (h >= u.lower && h <= u.upper) ? 1.0 / (u.upper - u.lower) : 0.0;
                   },
                   [h](const PiecewiseLinearEmpirical& emp) {
                       const auto& k = emp.knots;
                       if (h < k.front().h || h >= k.back().h) return 0.0;
                       const auto j = segment_of(k, h);
                       return (k[j + 1].F - k[j].F) / (k[j + 1].h - k[j].h);
                   }},
        params_);
}

double FadingDistribution::cdf(double h) const {
    require_nonnegative(h, "cdf");
    if (std::isinf(h)) return 1.0;
    return std::visit(
        overloaded{[h](const ExponentialGain& e) { return -std::expm1(-h / e.mean); },
                   [h](const UniformGain& u) {
                       if (h <= u.lower) return 0.0;
                       if (h >= u.upper) return 1.0;
                       return (h - u.lower) / (u.upper - u.lower);
                   },
                   [h](const PiecewiseLinearEmpirical& emp) {
                       const auto& k = emp.knots;
                       if (h <= k.front().h) return 0.0;
                       if (h >= k.back().h) return 1.0;
                       const auto j = segment_of(k, h);
                       const double w = (h - k[j].h) / (k[j + 1].h - k[j].h);
                       return k[j].F + w * (k[j + 1].F - k[j].F);
                   }},
        params_);
}

double FadingDistribution::survival(double h) const {
    require_nonnegative(h, "survival");
    if (std::isinf(h)) return 0.0;
    if (const auto* e = std::get_if<ExponentialGain>(&params_)) return std::exp(-h / e->mean);
    return 1.0 - cdf(h);
}

double FadingDistribution::quantile(double p) const {
    if (std::isnan(p) || p < 0.0 || p >= 1.0) {
        std::ostringstream msg;
        msg << "quantile: probability must lie in [0, 1), got " << p;
        throw std::domain_error(msg.str());
    }
    if (p == 0.0) return 0.0;
    return std::visit(
        overloaded{[p](const ExponentialGain& e) { return -e.mean * std::log1p(-p); },
                   [p](const UniformGain& u) { return u.lower + p * (u.upper - u.lower); },
                   [p](const PiecewiseLinearEmpirical& emp) {
                       const auto& k = emp.knots;
                       auto it = std::lower_bound(k.begin(), k.end(), p,
                                                  [](const CdfKnot& kn, double v) { return kn.F < v; });
                       // p > 0 = F_0, so it != begin; p < 1 = F_last, so it != end.
                       const auto& right = *it;
                       const auto& left = *(it - 1);
                       return left.h + (p - left.F) / (right.F - left.F) * (right.h - left.h);
                   }},
        params_);
}

double FadingDistribution::tail_point(double eps) const {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::domain_error("tail_point: eps must lie in (0, 1)");
    }
    return std::visit(overloaded{[eps](const ExponentialGain& e) { return -e.mean * std::log(eps); },
                                 [](const UniformGain& u) { return u.upper; },
                                 [](const PiecewiseLinearEmpirical& emp) { return emp.knots.back().h; }},
                      params_);
}

std::vector<double> FadingDistribution::pdf_breakpoints() const {
    return std::visit(overloaded{[](const ExponentialGain&) { return std::vector<double>{}; },
                                 [](const UniformGain& u) { return std::vector<double>{u.lower, u.upper}; },
                                 [](const PiecewiseLinearEmpirical& emp) {
                                     std::vector<double> out;
                                     out.reserve(emp.knots.size());
                                     for (const auto& k : emp.knots) out.push_back(k.h);
                                     return out;
                                 }},
                      params_);
}

double FadingDistribution::mean() const {
    return std::visit(overloaded{[](const ExponentialGain& e) { return e.mean; },
                                 [](const UniformGain& u) { return 0.5 * (u.lower + u.upper); },
                                 [](const PiecewiseLinearEmpirical& emp) {
                                     double m = 0.0;
                                     const auto& k = emp.knots;
                                     for (std::size_t j = 0; j + 1 < k.size(); ++j) {
                                         m += (k[j + 1].F - k[j].F) * 0.5 * (k[j].h + k[j + 1].h);
                                     }
                                     return m;
                                 }},
                      params_);
}

double FadingDistribution::variance() const {
    return std::visit(
        overloaded{[](const ExponentialGain& e) { return e.mean * e.mean; },
                   [](const UniformGain& u) {
                       const double w = u.upper - u.lower;
                       return w * w / 12.0;
                   },
                   [this](const PiecewiseLinearEmpirical& emp) {
                       double second = 0.0;
                       const auto& k = emp.knots;
                       for (std::size_t j = 0; j + 1 < k.size(); ++j) {
                           const double a = k[j].h, b = k[j + 1].h;
                           second += (k[j + 1].F - k[j].F) * (a * a + a * b + b * b) / 3.0;
                       }
                       const double m = mean();
                       return second - m * m;
                   }},
        params_);
}

double FadingDistribution::sample(CounterRng& rng) const {
    return quantile(rng.uniform());
}

std::string FadingDistribution::describe() const {
    std::ostringstream out;
    std::visit(overloaded{[&](const ExponentialGain& e) { out << "Exponential(mean=" << e.mean << ")"; },
                          [&](const UniformGain& u) {
                              out << "Uniform(" << u.lower << ", " << u.upper << ")";
                          },
                          [&](const PiecewiseLinearEmpirical& emp) {
                              out << "Empirical(" << emp.knots.size() << " knots)";
                          }},
               params_);
    return out.str();
}

}  // namespace ergocap
