#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace ergocap {

class CounterRng;

/// Exponentially distributed channel power gain (Rayleigh amplitude fading).
struct ExponentialGain {
    double mean = 1.0;
    bool operator==(const ExponentialGain&) const = default;
};

/// Power gain uniform on [lower, upper].
struct UniformGain {
    double lower = 0.0;
    double upper = 1.0;
    bool operator==(const UniformGain&) const = default;
};

struct CdfKnot {
    double h = 0.0;
    double F = 0.0;
    bool operator==(const CdfKnot&) const = default;
};

/// CDF given by linear interpolation between measured knots; the pdf is
/// piecewise constant.
struct PiecewiseLinearEmpirical {
    std::vector<CdfKnot> knots;
    bool operator==(const PiecewiseLinearEmpirical&) const = default;
};

enum class FadingKind { Exponential, Uniform, Empirical };

/// Law of one user's channel power gain h >= 0.
///
/// Immutable after construction. Every accessor rejects negative gains with
/// std::domain_error; callers map negative cross-user arguments through
/// clip_star before reaching the CDF. cdf(+inf) is 1.
class FadingDistribution {
public:
    using Parameters = std::variant<ExponentialGain, UniformGain, PiecewiseLinearEmpirical>;

    static FadingDistribution exponential(double mean);
    static FadingDistribution uniform(double lower, double upper);
    static FadingDistribution empirical(std::vector<CdfKnot> knots);
    /// Reads a two-column CSV with header `h,F`.
    static FadingDistribution empirical_from_csv(const std::filesystem::path& path);

    FadingKind kind() const;
    const Parameters& parameters() const { return params_; }

    double pdf(double h) const;
    double cdf(double h) const;
    /// Smallest h with cdf(h) >= p, for 0 <= p < 1.
    double quantile(double p) const;
    /// Complementary CDF 1 - F(h), computed without cancellation where the
    /// closed form allows it.
    double survival(double h) const;

    /// A point T with 1 - cdf(T) <= eps. Bounded laws return their upper
    /// support end, where the tail is exactly zero.
    double tail_point(double eps) const;
    /// Points where the pdf is discontinuous (support ends, knots).
    std::vector<double> pdf_breakpoints() const;

    double mean() const;
    double variance() const;

    /// Inverse-cdf draw from a uniform variate in (0, 1).
    double sample_from_uniform(double u) const { return quantile(u); }
    double sample(CounterRng& rng) const;

    std::string describe() const;

    bool operator==(const FadingDistribution&) const = default;

private:
    explicit FadingDistribution(Parameters p) : params_(std::move(p)) {}
    Parameters params_;
};

}  // namespace ergocap
