#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "rng.hpp"
#include "sample.hpp"

namespace crisk {

enum class OutcomeUnits { Returns, Pnl };

// Discrete joint distribution of asset outcomes: T scenarios x d assets with
// probability weights nu. Outcomes are per-period returns (0.01 = 1%) or
// discounted P&L per unit of spot, declared by `units`.
struct ScenarioSet {
    Matrix outcomes;                       // T x d
    std::vector<double> weights;           // nu, sums to 1
    std::vector<std::string> labels;       // d asset names
    std::optional<std::size_t> index_col;  // designated market index asset
    OutcomeUnits units = OutcomeUnits::Returns;
    double period = 1.0;                   // unit period length, informational

    std::size_t scenario_count() const { return outcomes.rows; }
    std::size_t asset_count() const { return outcomes.cols; }
};

struct MarketModel {
    ScenarioSet scenarios;
    double risk_free = 0.0;     // per unit period, > -1
    std::vector<double> spot;   // s0, componentwise > 0
};

inline void validate_scenarios(const ScenarioSet& s) {
    if (s.outcomes.rows == 0 || s.outcomes.cols == 0)
        throw std::invalid_argument("ScenarioSet: empty outcome matrix");
    if (s.weights.size() != s.outcomes.rows)
        throw std::invalid_argument("ScenarioSet: weight count must match scenario count");
    if (!s.labels.empty() && s.labels.size() != s.outcomes.cols)
        throw std::invalid_argument("ScenarioSet: label count must match asset count");
    for (double w : s.weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("ScenarioSet: weights must be nonnegative");
    if (std::abs(compensated_sum(s.weights) - 1.0) > kWeightSumTol)
        throw std::invalid_argument("ScenarioSet: weights must sum to 1");
    for (double v : s.outcomes.data)
        if (!std::isfinite(v))
            throw std::invalid_argument("ScenarioSet: non-finite outcome");
    if (s.index_col && *s.index_col >= s.outcomes.cols)
        throw std::invalid_argument("ScenarioSet: index column out of range");
}

inline void validate_market(const MarketModel& m) {
    validate_scenarios(m.scenarios);
    if (!(m.risk_free > -1.0))
        throw std::invalid_argument("MarketModel: risk-free rate must exceed -1");
    if (m.spot.size() != m.scenarios.asset_count())
        throw std::invalid_argument("MarketModel: spot count must match asset count");
    for (double s : m.spot)
        if (!(s > 0.0) || !std::isfinite(s))
            throw std::invalid_argument("MarketModel: spot prices must be positive");
}

// One sample column of the scenario set as a weighted Sample.
inline Sample column_sample(const ScenarioSet& s, std::size_t col) {
    if (col >= s.asset_count())
        throw std::invalid_argument("column_sample: column out of range");
    return Sample{s.outcomes.col(col), s.weights};
}

inline std::size_t find_label(const ScenarioSet& s, const std::string& label) {
    for (std::size_t i = 0; i < s.labels.size(); ++i)
        if (s.labels[i] == label) return i;
    throw data_error("unknown asset label '" + label + "'");
}

// Reweights scenarios so the t-th most recent row has weight proportional to
// lambda^(t-1), renormalized. Rows are ordered oldest -> newest, so recency
// is counted from the last row; outcomes are untouched.
inline ScenarioSet weight_geometric(const ScenarioSet& s, double lambda) {
    validate_scenarios(s);
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("weight_geometric: lambda must lie in (0,1)");
    const std::size_t t = s.scenario_count();
    ScenarioSet out = s;
    double mass = 1.0;
    double total = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
        out.weights[t - 1 - k] = mass;
        total += mass;
        mass *= lambda;
    }
    for (double& w : out.weights) w /= total;
    return out;
}

// Bootstrapped historical simulation: each output scenario compounds n
// randomly drawn sub-period rows jointly across assets,
//   x^i = prod_k (1 + r_k^i) - 1,
// so cross-asset dependence within a drawn row is preserved. Draws are with
// replacement; recency_lambda biases the draw toward recent rows with a
// geometric schedule while the output weights stay uniform.
inline ScenarioSet bootstrap(const ScenarioSet& s, int n, int t_out, std::uint64_t seed,
                             std::optional<double> recency_lambda = std::nullopt) {
    validate_scenarios(s);
    if (n < 1) throw std::invalid_argument("bootstrap: n must be >= 1");
    if (t_out < 1) throw std::invalid_argument("bootstrap: t_out must be >= 1");
    const std::size_t t_src = s.scenario_count();
    const std::size_t d = s.asset_count();

    std::vector<double> draw_weights(t_src, 1.0);
    if (recency_lambda) {
        if (!(*recency_lambda > 0.0 && *recency_lambda < 1.0))
            throw std::invalid_argument("bootstrap: recency_lambda must lie in (0,1)");
        double mass = 1.0;
        for (std::size_t k = 0; k < t_src; ++k) {
            draw_weights[t_src - 1 - k] = mass;
            mass *= *recency_lambda;
        }
    }
    DiscreteSampler sampler(draw_weights);
    Rng rng(seed);

    ScenarioSet out;
    out.outcomes = Matrix(static_cast<std::size_t>(t_out), d);
    out.weights.assign(static_cast<std::size_t>(t_out), 1.0 / static_cast<double>(t_out));
    out.labels = s.labels;
    out.index_col = s.index_col;
    out.units = s.units;
    out.period = s.period;

    std::vector<double> gross(d);
    for (std::size_t row = 0; row < static_cast<std::size_t>(t_out); ++row) {
        gross.assign(d, 1.0);
        for (int k = 0; k < n; ++k) {
            const std::size_t pick = sampler.sample(rng);
            for (std::size_t i = 0; i < d; ++i)
                gross[i] *= 1.0 + s.outcomes(pick, i);
        }
        for (std::size_t i = 0; i < d; ++i)
            out.outcomes(row, i) = gross[i] - 1.0;
    }
    return out;
}

// Joint return vector generator for Monte Carlo simulation.
using ReturnSampler = std::function<std::vector<double>(Rng&)>;

inline ScenarioSet monte_carlo(const ReturnSampler& hook, std::vector<std::string> labels,
                               int t_out, std::uint64_t seed) {
    if (t_out < 1) throw std::invalid_argument("monte_carlo: t_out must be >= 1");
    if (labels.empty()) throw std::invalid_argument("monte_carlo: need at least one label");
    const std::size_t d = labels.size();
    Rng rng(seed);

    ScenarioSet out;
    out.outcomes = Matrix(static_cast<std::size_t>(t_out), d);
    out.weights.assign(static_cast<std::size_t>(t_out), 1.0 / static_cast<double>(t_out));
    out.labels = std::move(labels);

    for (std::size_t row = 0; row < static_cast<std::size_t>(t_out); ++row) {
        std::vector<double> draw;
        try {
            draw = hook(rng);
        } catch (const std::exception& e) {
            throw data_error(std::string("monte_carlo: sampler hook failed: ") + e.what());
        }
        if (draw.size() != d)
            throw data_error("monte_carlo: sampler hook emitted wrong dimension");
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(draw[i]))
                throw data_error("monte_carlo: sampler hook emitted non-finite value");
            out.outcomes(row, i) = draw[i];
        }
    }
    return out;
}

// Discounted P&L increments: entry (t,i) = s0_i / (1+r_f) * (r_ti - r_f).
inline Matrix pnl_from_returns(const MarketModel& m) {
    validate_market(m);
    if (m.scenarios.units != OutcomeUnits::Returns)
        throw std::invalid_argument("pnl_from_returns: scenarios already in P&L units");
    const std::size_t t = m.scenarios.scenario_count();
    const std::size_t d = m.scenarios.asset_count();
    Matrix pnl(t, d);
    const double disc = 1.0 + m.risk_free;
    for (std::size_t row = 0; row < t; ++row)
        for (std::size_t i = 0; i < d; ++i)
            pnl(row, i) = m.spot[i] / disc * (m.scenarios.outcomes(row, i) - m.risk_free);
    return pnl;
}

// Scenario outcomes as discounted P&L: converts return-mode sets, passes
// P&L-mode sets through unchanged.
inline Matrix market_pnl(const MarketModel& m) {
    if (m.scenarios.units == OutcomeUnits::Pnl) {
        validate_market(m);
        return m.scenarios.outcomes;
    }
    return pnl_from_returns(m);
}

// Gaussian sampler fitted to the weighted mean and covariance of a scenario
// set (for the `mc` generation method; heavier models plug in their own hook).
inline ReturnSampler fit_gaussian_hook(const ScenarioSet& s, double ridge = 1e-12) {
    validate_scenarios(s);
    const std::size_t t = s.scenario_count();
    const std::size_t d = s.asset_count();

    std::vector<double> mean(d, 0.0);
    for (std::size_t row = 0; row < t; ++row)
        for (std::size_t i = 0; i < d; ++i)
            mean[i] += s.weights[row] * s.outcomes(row, i);

    Matrix cov(d, d);
    for (std::size_t row = 0; row < t; ++row)
        for (std::size_t i = 0; i < d; ++i) {
            const double di = s.outcomes(row, i) - mean[i];
            for (std::size_t j = 0; j <= i; ++j)
                cov(i, j) += s.weights[row] * di * (s.outcomes(row, j) - mean[j]);
        }
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += cov(i, i);
    const double bump = ridge * std::max(trace / static_cast<double>(d), 1.0);
    for (std::size_t i = 0; i < d; ++i) {
        cov(i, i) += bump;
        for (std::size_t j = i + 1; j < d; ++j) cov(i, j) = cov(j, i);
    }

    // Lower Cholesky factor; semidefinite directions collapse to zero.
    Matrix chol(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = cov(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= chol(i, k) * chol(j, k);
            if (i == j)
                chol(i, j) = sum > 0.0 ? std::sqrt(sum) : 0.0;
            else
                chol(i, j) = chol(j, j) > 0.0 ? sum / chol(j, j) : 0.0;
        }
    }

    return [mean, chol, d](Rng& rng) {
        std::vector<double> z(d), out(d);
        for (std::size_t i = 0; i < d; ++i) z[i] = rng.gaussian();
        for (std::size_t i = 0; i < d; ++i) {
            double v = mean[i];
            for (std::size_t k = 0; k <= i; ++k) v += chol(i, k) * z[k];
            out[i] = v;
        }
        return out;
    };
}

} // namespace crisk
