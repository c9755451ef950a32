#include "ergocap/montecarlo.hpp"

#include "ergocap/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ergocap {

namespace {

constexpr std::size_t kChunk = 4096;

// Welford accumulator; chunks are merged in index order.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
    double std_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

// Runs `body(chunk_index, moments)` for every chunk of [0, n) and merges the
// per-chunk moments in chunk order.
template <class Body>
std::vector<Moments> chunked_moments(std::size_t n, std::size_t width, unsigned threads, Body body) {
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<Moments>> per_chunk(chunks, std::vector<Moments>(width));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            const std::size_t begin = c * kChunk;
            const std::size_t end = std::min(n, begin + kChunk);
            body(begin, end, per_chunk[c]);
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    std::vector<Moments> total(width);
    for (const auto& chunk : per_chunk) {
        for (std::size_t j = 0; j < width; ++j) total[j].merge(chunk[j]);
    }
    return total;
}

void check_sizes(const ChannelConfig& channel, const RateAwardVector& mu, const LambdaVector& lam) {
    channel.validate();
    if (mu.size() != channel.size() || lam.size() != channel.size()) {
        throw std::invalid_argument("monte carlo: mu/lambda sizes differ from user count");
    }
}

}  // namespace

double utility(std::size_t i, double z, double h_i, const RateAwardVector& mu, const LambdaVector& lam,
               double sigma2) {
    return mu[i] / (2.0 * (sigma2 + z)) - lam[i] / h_i;
}

WinnerPartition winner_partition(const FadingState& state, const RateAwardVector& mu,
                                 const LambdaVector& lam, double sigma2) {
    const std::size_t m = state.h.size();
    WinnerPartition out;

    double zmax = 0.0;
    std::vector<double> cuts{0.0};
    for (std::size_t i = 0; i < m; ++i) {
        const double root = mu[i] * state.h[i] / (2.0 * lam[i]) - sigma2;
        zmax = std::max(zmax, root);
        cuts.push_back(root);
    }
    if (!(zmax > 0.0)) return out;

    // u_i = u_j  <=>  2 (sigma2 + z) = (mu_i - mu_j) / (lam_i/h_i - lam_j/h_j).
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double cost_gap = lam[i] / state.h[i] - lam[j] / state.h[j];
            if (cost_gap == 0.0) continue;
            const double a = (mu[i] - mu[j]) / cost_gap;
            if (a > 2.0 * sigma2) cuts.push_back(0.5 * a - sigma2);
        }
    }
    std::erase_if(cuts, [&](double z) { return !(z >= 0.0 && z < zmax); });
    cuts.push_back(zmax);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        const double mid = 0.5 * (lo + hi);
        std::size_t best = 0;
        double best_u = utility(0, mid, state.h[0], mu, lam, sigma2);
        bool tie = false;
        for (std::size_t i = 1; i < m; ++i) {
            const double u = utility(i, mid, state.h[i], mu, lam, sigma2);
            if (u > best_u) {
                best_u = u;
                best = i;
                tie = false;
            } else if (u == best_u) {
                tie = true;
            }
        }
        if (!(best_u > 0.0)) continue;
        out.tie = out.tie || tie;
        if (!out.intervals.empty() && out.intervals.back().winner == best &&
            out.intervals.back().z_hi == lo) {
            out.intervals.back().z_hi = hi;
        } else {
            out.intervals.push_back({lo, hi, best});
        }
    }
    return out;
}

Allocation per_state_allocation(const WinnerPartition& partition, const FadingState& state,
                                double sigma2) {
    const std::size_t m = state.h.size();
    Allocation out{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (const auto& iv : partition.intervals) {
        out.rates[iv.winner] += 0.5 * std::log1p((iv.z_hi - iv.z_lo) / (sigma2 + iv.z_lo));
        out.powers[iv.winner] += (iv.z_hi - iv.z_lo) / state.h[iv.winner];
    }
    return out;
}

FadingState draw_state(const ChannelConfig& channel, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, index);
    FadingState state;
    state.h.reserve(channel.size());
    for (const auto& user : channel.users) {
        double h = 0.0;
        // A zero gain has probability zero under a continuous law; redraw.
        while (!(h > 0.0)) h = user.fading.sample(rng);
        state.h.push_back(h);
    }
    return state;
}

MonteCarloEstimate estimate(const ChannelConfig& channel, const RateAwardVector& mu,
                            const LambdaVector& lam, std::size_t n_samples, std::uint64_t seed,
                            unsigned threads) {
    check_sizes(channel, mu, lam);
    if (n_samples < 1) throw std::invalid_argument("monte carlo: n_samples must be >= 1");
    const std::size_t m = channel.size();

    auto moments = chunked_moments(n_samples, 2 * m, threads,
                                   [&](std::size_t begin, std::size_t end, std::vector<Moments>& acc) {
                                       for (std::size_t s = begin; s < end; ++s) {
                                           const auto state = draw_state(channel, seed, s);
                                           const auto alloc = per_state_allocation(
                                               winner_partition(state, mu, lam, channel.sigma2), state,
                                               channel.sigma2);
                                           for (std::size_t i = 0; i < m; ++i) {
                                               acc[i].add(alloc.rates[i]);
                                               acc[m + i].add(alloc.powers[i]);
                                           }
                                       }
                                   });

    MonteCarloEstimate out;
    out.samples = n_samples;
    for (std::size_t i = 0; i < m; ++i) {
        out.mean_rates.push_back(moments[i].mean);
        out.rate_std_errors.push_back(moments[i].std_error());
        out.mean_powers.push_back(moments[m + i].mean);
        out.power_std_errors.push_back(moments[m + i].std_error());
    }
    return out;
}

ProbabilityEstimate estimate_win_probability(const ChannelConfig& channel, std::size_t i, double z,
                                             const RateAwardVector& mu, const LambdaVector& lam,
                                             std::size_t n_samples, std::uint64_t seed,
                                             unsigned threads) {
    check_sizes(channel, mu, lam);
    if (i >= channel.size()) throw std::out_of_range("estimate_win_probability: user index");
    if (!(z >= 0.0)) throw std::domain_error("estimate_win_probability: z must be nonnegative");
    if (n_samples < 1) throw std::invalid_argument("monte carlo: n_samples must be >= 1");

    auto moments = chunked_moments(n_samples, 1, threads,
                                   [&](std::size_t begin, std::size_t end, std::vector<Moments>& acc) {
                                       for (std::size_t s = begin; s < end; ++s) {
                                           const auto state = draw_state(channel, seed, s);
                                           const double ui = utility(i, z, state.h[i], mu, lam, channel.sigma2);
                                           bool wins = ui > 0.0;
                                           for (std::size_t k = 0; wins && k < channel.size(); ++k) {
                                               if (k != i && !(ui > utility(k, z, state.h[k], mu, lam,
                                                                            channel.sigma2))) {
                                                   wins = false;
                                               }
                                           }
                                           acc[0].add(wins ? 1.0 : 0.0);
                                       }
                                   });
    return {moments[0].mean, moments[0].std_error()};
}

}  // namespace ergocap
