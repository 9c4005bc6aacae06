#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "scenario.hpp"
#include "spectral.hpp"

namespace crisk {

// Extreme measure of a portfolio outcome W: the scenario reweighting Q that
// attains E_Q W = -rho_mu(W). Per-scenario masses are the Psi-increments at
// the sorted cumulative weights; within a block of tied values the block's
// total mass is split proportionally to the scenario weights, which leaves
// every linear functional of Q with block-constant integrand unchanged.
struct ExtremeWeights {
    std::vector<double> q;
    bool has_ties = false;
};

inline ExtremeWeights extreme_measure(const Sample& w, const WeightingMeasure& mu) {
    validate_sample(w);
    const auto order = ascending_order(w.values);
    const std::size_t n = order.size();
    std::vector<double> sorted_weights(n);
    for (std::size_t p = 0; p < n; ++p) sorted_weights[p] = w.weights[order[p]];
    const auto mass = sorted_psi_masses(mu, sorted_weights);

    ExtremeWeights out;
    out.q.assign(n, 0.0);
    std::size_t p = 0;
    while (p < n) {
        std::size_t end = p + 1;
        const double v = w.values[order[p]];
        while (end < n && w.values[order[end]] == v) ++end;
        if (end == p + 1) {
            out.q[order[p]] = mass[p];
        } else {
            out.has_ties = true;
            double block_mass = 0.0;
            double block_nu = 0.0;
            for (std::size_t i = p; i < end; ++i) {
                block_mass += mass[i];
                block_nu += sorted_weights[i];
            }
            for (std::size_t i = p; i < end; ++i)
                out.q[order[i]] = block_nu > 0.0 ? block_mass * sorted_weights[i] / block_nu : 0.0;
        }
        p = end;
    }
    return out;
}

// Risk contribution of X to W: rho^c_mu(X;W) = -E_{Q_mu(W)} X, the one-sided
// directional derivative of rho_mu at W toward X.
inline double risk_contribution(std::span<const double> x, const Sample& w,
                                const WeightingMeasure& mu) {
    if (x.size() != w.values.size())
        throw std::invalid_argument("risk_contribution: X and W must share the scenario index");
    const auto q = extreme_measure(w, mu);
    double acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) acc += q.q[t] * x[t];
    return -acc;
}

// Monte Carlo estimate with a per-group standard error so callers can build
// confidence bands.
struct McEstimate {
    double value = 0.0;
    double std_err = 0.0;
    long groups = 0;
};

// Draws one (x, y) pair, e.g. (asset return, index return).
using PairSampler = std::function<std::pair<double, double>(Rng&)>;

// Draws rows of a fixed pair set with probabilities nu.
inline PairSampler make_pair_sampler(std::vector<double> x, std::vector<double> y,
                                     std::vector<double> nu) {
    if (x.size() != y.size() || x.size() != nu.size() || x.empty())
        throw std::invalid_argument("make_pair_sampler: inconsistent pair data");
    auto sampler = std::make_shared<DiscreteSampler>(nu);
    auto xs = std::make_shared<std::vector<double>>(std::move(x));
    auto ys = std::make_shared<std::vector<double>>(std::move(y));
    return [sampler, xs, ys](Rng& rng) {
        const std::size_t t = sampler->sample(rng);
        return std::pair<double, double>{(*xs)[t], (*ys)[t]};
    };
}

namespace detail {

// Positions of the m smallest y-draws within one group, ties broken by draw
// order so results are reproducible.
inline void smallest_by_y(const std::vector<double>& y, std::size_t m,
                          std::vector<std::size_t>& out) {
    out.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = i;
    std::stable_sort(out.begin(), out.end(),
                     [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    out.resize(m);
}

inline McEstimate summarize_groups(const std::vector<double>& g) {
    McEstimate est;
    est.groups = static_cast<long>(g.size());
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    if (g.size() > 1) {
        for (double v : g) var += (v - mean) * (v - mean);
        var /= static_cast<double>(g.size() - 1);
    }
    est.value = -mean;
    est.std_err = std::sqrt(var / static_cast<double>(g.size()));
    return est;
}

} // namespace detail

// Order-statistic Monte Carlo estimator of the Beta V@R risk contribution:
// per group of alpha pairs, average x over the beta positions whose y-draws
// are smallest; the estimate is minus the mean over K groups.
inline McEstimate mc_contribution_beta(const PairSampler& source, int alpha, int beta,
                                       long k, std::uint64_t seed) {
    if (alpha < 1 || beta < 1 || beta > alpha)
        throw std::invalid_argument("mc_contribution_beta: need integers 1 <= beta <= alpha");
    if (k < 1) throw std::invalid_argument("mc_contribution_beta: k must be >= 1");
    Rng rng(seed);
    std::vector<double> xs(alpha), ys(alpha), stats;
    std::vector<std::size_t> sel;
    stats.reserve(static_cast<std::size_t>(k));
    for (long group = 0; group < k; ++group) {
        for (int l = 0; l < alpha; ++l) {
            const auto [x, y] = source(rng);
            xs[l] = x;
            ys[l] = y;
        }
        detail::smallest_by_y(ys, static_cast<std::size_t>(beta), sel);
        double s = 0.0;
        for (std::size_t pos : sel) s += xs[pos];
        stats.push_back(s / static_cast<double>(beta));
    }
    return detail::summarize_groups(stats);
}

// Alpha V@R variant: per group take x at the argmin of the y-draws.
inline McEstimate mc_contribution_alpha(const PairSampler& source, int alpha, long k,
                                        std::uint64_t seed) {
    if (alpha < 1) throw std::invalid_argument("mc_contribution_alpha: alpha must be >= 1");
    if (k < 1) throw std::invalid_argument("mc_contribution_alpha: k must be >= 1");
    Rng rng(seed);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(k));
    for (long group = 0; group < k; ++group) {
        double best_y = 0.0, best_x = 0.0;
        for (int l = 0; l < alpha; ++l) {
            const auto [x, y] = source(rng);
            if (l == 0 || y < best_y) {
                best_y = y;
                best_x = x;
            }
        }
        stats.push_back(best_x);
    }
    return detail::summarize_groups(stats);
}

// Q-expected discounted P&L of one asset, with Q the extreme measure of the
// index return:
//   E_Q dS^i = -s0_i/(1+r_f) * rho^c(r^i; r_I) - s0_i r_f/(1+r_f).
// The reward E_P dS^i is -R* times this value once R* is known.
inline double reward_estimate(const MarketModel& m, const WeightingMeasure& mu,
                              std::size_t asset) {
    validate_market(m);
    if (m.scenarios.units != OutcomeUnits::Returns)
        throw std::invalid_argument("reward_estimate: scenarios must be in return units");
    if (!m.scenarios.index_col)
        throw std::invalid_argument("reward_estimate: scenario set has no index designation");
    if (asset >= m.scenarios.asset_count())
        throw std::invalid_argument("reward_estimate: asset out of range");
    const Sample index = column_sample(m.scenarios, *m.scenarios.index_col);
    const auto asset_returns = m.scenarios.outcomes.col(asset);
    const double rc = risk_contribution(asset_returns, index, mu);
    const double disc = 1.0 + m.risk_free;
    return -m.spot[asset] / disc * rc - m.spot[asset] * m.risk_free / disc;
}

} // namespace crisk
