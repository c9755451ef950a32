#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace ergocap {

/// A finite-range integration problem. The caller truncates the
/// semi-infinite domain [lower, inf) at `truncation_point`, chosen from an
/// analytic tail bound.
struct IntegrationRequest {
    std::function<double(double)> integrand;
    double lower = 0.0;
    /// Sorted interior points in (lower, truncation_point) where the
    /// integrand may jump or kink. Panels never straddle them.
    std::vector<double> breakpoints;
    double truncation_point = 0.0;
    double abs_tol = 1e-10;
    std::size_t max_evals = 250000;
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evals = 0;
    bool converged = true;
};

/// Globally adaptive 15-point Gauss-Kronrod integration.
///
/// The range is first cut at every breakpoint; the panel with the largest
/// error estimate is then bisected until the summed estimate drops below
/// abs_tol or the evaluation budget runs out (converged = false, best
/// estimate returned). Nodes are interior, so the integrand is never
/// evaluated exactly at a breakpoint. Summation order is fixed by panel
/// position, so a given request is bit-reproducible.
IntegrationResult integrate(const IntegrationRequest& req);

/// Same as integrate(), without type erasure for hot nested loops.
template <class F>
IntegrationResult integrate_fn(F&& f, double lower, double upper,
                               const std::vector<double>& breakpoints, double abs_tol,
                               std::size_t max_evals);

/// Merges candidate breakpoints: keeps those strictly inside (lower, upper),
/// sorted and deduplicated.
std::vector<double> clean_breakpoints(std::vector<double> points, double lower, double upper);

namespace detail {

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
};

// Kronrod nodes (descending) and weights for the 7/15 pair.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel gauss_kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        const double sum = fv1[j] + fv2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    }
    const double ahalf = std::abs(half);
    resasc *= ahalf;
    resabs *= ahalf;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = 2.220446049250313e-16;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    return {a, b, resk * half, err};
}

}  // namespace detail

template <class F>
IntegrationResult integrate_fn(F&& f, double lower, double upper,
                               const std::vector<double>& breakpoints, double abs_tol,
                               std::size_t max_evals) {
    IntegrationResult result;
    if (!(upper > lower)) return result;

    std::vector<detail::Panel> panels;
    double a = lower;
    for (double bp : breakpoints) {
        if (bp <= a || bp >= upper) continue;
        panels.push_back(detail::gauss_kronrod15(f, a, bp));
        a = bp;
    }
    panels.push_back(detail::gauss_kronrod15(f, a, upper));
    result.evals = 15 * panels.size();

    auto total_error = [&] {
        double e = 0.0;
        for (const auto& p : panels) e += p.error;
        return e;
    };
    auto by_error = [&](std::size_t l, std::size_t r) { return panels[l].error < panels[r].error; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> queue(by_error);
    for (std::size_t j = 0; j < panels.size(); ++j) queue.push(j);

    double err = total_error();
    while (err > abs_tol && !queue.empty()) {
        if (result.evals + 30 > max_evals) break;
        const std::size_t j = queue.top();
        queue.pop();
        const detail::Panel p = panels[j];
        const double mid = 0.5 * (p.a + p.b);
        // Panels too narrow to split in floating point drop out of the queue.
        if ((p.b - p.a) < 64.0 * 2.2e-16 * std::max(std::abs(p.a), std::abs(p.b)) ||
            !(mid > p.a && mid < p.b)) {
            continue;
        }
        panels[j] = detail::gauss_kronrod15(f, p.a, mid);
        panels.push_back(detail::gauss_kronrod15(f, mid, p.b));
        result.evals += 30;
        err += panels[j].error + panels.back().error - p.error;
        queue.push(j);
        queue.push(panels.size() - 1);
        if (queue.size() % 64 == 0) err = total_error();
    }

    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& l, const detail::Panel& r) { return l.a < r.a; });
    double value = 0.0;
    for (const auto& p : panels) value += p.value;
    result.value = value;
    result.error_estimate = total_error();
    result.converged = result.error_estimate <= abs_tol;
    return result;
}

}  // namespace ergocap
