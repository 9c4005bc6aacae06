#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "extreme.hpp"
#include "matrix.hpp"
#include "optimizer.hpp"
#include "scenario.hpp"

namespace crisk {

// Risk-neutral contact kernel: the mixture
//   r = nu / (1+R*) + q * R* / (1+R*)
// of the real-world weights and the market extreme measure. Under it every
// primitive asset prices to zero expected discounted P&L.
struct ContactKernel {
    double r_star = 0.0;
    std::vector<double> q; // market extreme measure
    std::vector<double> r; // contact weights
    double worst_violation = std::numeric_limits<double>::quiet_NaN();
};

inline ContactKernel contact_measure(const std::vector<double>& nu,
                                     const std::vector<double>& q, double r_star) {
    if (nu.size() != q.size() || nu.empty())
        throw std::invalid_argument("contact_measure: weight vectors must match");
    if (!(r_star >= 0.0) || !std::isfinite(r_star))
        throw std::invalid_argument("contact_measure: r_star must be nonnegative");
    ContactKernel ck;
    ck.r_star = r_star;
    ck.q = q;
    ck.r.resize(nu.size());
    const double p_weight = 1.0 / (1.0 + r_star);
    const double q_weight = 1.0 - p_weight; // equals R*/(1+R*), sums with p_weight to 1 exactly
    for (std::size_t t = 0; t < nu.size(); ++t)
        ck.r[t] = p_weight * nu[t] + q_weight * q[t];
    return ck;
}

// Largest |E_r dS^i| across assets under the kernel's contact weights.
inline double worst_pricing_error(const ContactKernel& ck, const Matrix& pnl) {
    if (ck.r.size() != pnl.rows)
        throw std::invalid_argument("worst_pricing_error: scenario count mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < pnl.cols; ++i) {
        double e = 0.0;
        for (std::size_t row = 0; row < pnl.rows; ++row) e += ck.r[row] * pnl(row, i);
        worst = std::max(worst, std::abs(e));
    }
    return worst;
}

// Checked builder: verifies risk-neutrality against the scenario P&L. A
// violation beyond tol signals a non-converged optimum.
inline ContactKernel contact_measure(const std::vector<double>& nu,
                                     const std::vector<double>& q, double r_star,
                                     const Matrix& pnl, double tol) {
    ContactKernel ck = contact_measure(nu, q, r_star);
    ck.worst_violation = worst_pricing_error(ck, pnl);
    if (!(ck.worst_violation <= tol))
        throw non_convergence_error(
            "contact_measure: kernel fails risk-neutrality, optimum looks non-converged", 0,
            ck.worst_violation, 0.0);
    return ck;
}

inline ContactKernel contact_measure(const std::vector<double>& nu, const ExtremeWeights& q,
                                     double r_star) {
    return contact_measure(nu, q.q, r_star);
}

namespace detail {

// Extreme measure used for SML statistics: the solver's certificate when the
// result carries one, otherwise the sorted-order extreme measure of <h*, dS>.
inline std::vector<double> market_extreme_weights(const MarketModel& model,
                                                  const WeightingMeasure& mu,
                                                  const FrontierResult& res) {
    if (!res.extreme_weights.empty()) return res.extreme_weights;
    const Matrix pnl = market_pnl(model);
    std::vector<double> w(pnl.rows, 0.0);
    for (std::size_t row = 0; row < pnl.rows; ++row)
        for (std::size_t i = 0; i < pnl.cols; ++i)
            w[row] += res.h_star.h[i] * pnl(row, i);
    return extreme_measure(Sample{std::move(w), model.scenarios.weights}, mu).q;
}

} // namespace detail

// Q-excess return of the market portfolio, the denominator of every beta.
inline double market_excess_under_q(const MarketModel& model, const Strategy& h_star,
                                    const std::vector<double>& q) {
    validate_market(model);
    if (model.scenarios.units != OutcomeUnits::Returns)
        throw std::invalid_argument("sml: scenarios must be in return units");
    const std::size_t d = model.scenarios.asset_count();
    if (h_star.h.size() != d) throw std::invalid_argument("sml: strategy dimension mismatch");
    double basis = 0.0; // <h*, S0>
    for (std::size_t i = 0; i < d; ++i) basis += h_star.h[i] * model.spot[i];
    if (!(std::abs(basis) > 0.0))
        throw std::invalid_argument("sml: degenerate market portfolio, <h*, S0> = 0");
    // r_* - r_f = (1+r_f)/<h*,S0> * <h*, dS>
    const Matrix pnl = market_pnl(model);
    double eq = 0.0;
    for (std::size_t row = 0; row < pnl.rows; ++row) {
        double w = 0.0;
        for (std::size_t i = 0; i < d; ++i) w += h_star.h[i] * pnl(row, i);
        eq += q[row] * w;
    }
    return (1.0 + model.risk_free) / basis * eq;
}

// Beta of an arbitrary per-scenario return stream against the market optimum.
inline double sml_beta(const MarketModel& model, const FrontierResult& res,
                       const WeightingMeasure& mu, const std::vector<double>& asset_returns) {
    if (asset_returns.size() != model.scenarios.scenario_count())
        throw std::invalid_argument("sml_beta: scenario count mismatch");
    const auto q = detail::market_extreme_weights(model, mu, res);
    const double denom = market_excess_under_q(model, res.h_star, q);
    if (!(std::abs(denom) > 1e-300))
        throw std::invalid_argument("sml_beta: zero market excess under Q");
    double num = 0.0;
    for (std::size_t row = 0; row < asset_returns.size(); ++row)
        num += q[row] * (asset_returns[row] - model.risk_free);
    return num / denom;
}

// Per-asset SML betas: beta^i = E_Q(r^i - r_f) / E_Q(r_* - r_f).
inline std::vector<double> sml_betas(const MarketModel& model, const WeightingMeasure& mu,
                                     const FrontierResult& res) {
    validate_market(model);
    if (model.scenarios.units != OutcomeUnits::Returns)
        throw std::invalid_argument("sml_betas: scenarios must be in return units");
    const auto q = detail::market_extreme_weights(model, mu, res);
    const double denom = market_excess_under_q(model, res.h_star, q);
    if (!(std::abs(denom) > 1e-300))
        throw std::invalid_argument("sml_betas: zero market excess under Q");
    const std::size_t d = model.scenarios.asset_count();
    std::vector<double> betas(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double num = 0.0;
        for (std::size_t row = 0; row < model.scenarios.scenario_count(); ++row)
            num += q[row] * (model.scenarios.outcomes(row, i) - model.risk_free);
        betas[i] = num / denom;
    }
    return betas;
}

// First-order certificate per asset: E_P dS^i + R* E_Q dS^i, evaluated with
// an explicit strategy/ratio pair.
inline std::vector<double> sml_residuals(const MarketModel& model, const WeightingMeasure& mu,
                                         const Strategy& h, double r_star) {
    const Matrix pnl = market_pnl(model);
    if (h.h.size() != pnl.cols)
        throw std::invalid_argument("sml_residuals: strategy dimension mismatch");
    std::vector<double> w(pnl.rows, 0.0);
    for (std::size_t row = 0; row < pnl.rows; ++row)
        for (std::size_t i = 0; i < pnl.cols; ++i) w[row] += h.h[i] * pnl(row, i);
    const auto q = extreme_measure(Sample{std::move(w), model.scenarios.weights}, mu);
    std::vector<double> out(pnl.cols, 0.0);
    for (std::size_t i = 0; i < pnl.cols; ++i) {
        double ep = 0.0, eq = 0.0;
        for (std::size_t row = 0; row < pnl.rows; ++row) {
            ep += model.scenarios.weights[row] * pnl(row, i);
            eq += q.q[row] * pnl(row, i);
        }
        out[i] = ep + r_star * eq;
    }
    return out;
}

inline std::vector<double> sml_residuals(const MarketModel& model, const WeightingMeasure& mu,
                                         const FrontierResult& res) {
    if (res.extreme_weights.empty())
        return sml_residuals(model, mu, res.h_star, res.r_star);
    const Matrix pnl = market_pnl(model);
    std::vector<double> out(pnl.cols, 0.0);
    for (std::size_t i = 0; i < pnl.cols; ++i) {
        double ep = 0.0, eq = 0.0;
        for (std::size_t row = 0; row < pnl.rows; ++row) {
            ep += model.scenarios.weights[row] * pnl(row, i);
            eq += res.extreme_weights[row] * pnl(row, i);
        }
        out[i] = ep + res.r_star * eq;
    }
    return out;
}

// N agents with endowments W_n and risk-aversion coefficients a_n; each has
// preferences linear in reward and quadratic in risk.
struct Economy {
    std::vector<double> endowments;
    std::vector<double> aversions;

    std::size_t agent_count() const { return endowments.size(); }
};

inline void validate_economy(const Economy& e) {
    if (e.endowments.empty() || e.endowments.size() != e.aversions.size())
        throw std::invalid_argument("Economy: endowment/aversion lists must match and be nonempty");
    for (double w : e.endowments)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("Economy: endowments must be positive");
    for (double a : e.aversions)
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("Economy: aversions must be positive");
}

inline double risk_tolerance_sum(const Economy& e) {
    validate_economy(e);
    double k = 0.0;
    for (std::size_t n = 0; n < e.agent_count(); ++n) k += e.endowments[n] / e.aversions[n];
    return k;
}

// Equilibrium market premium: the positive root of
//   R*^2 + R* - (sum W_n/a_n)^-1 [E_P<H*,S1> + rho(<H*,S1>)] = 0.
inline double equilibrium_rstar(const Economy& e, double market_value, double risk_value) {
    const double k = risk_tolerance_sum(e);
    const double bracket = market_value + risk_value;
    if (!(bracket >= 0.0))
        throw std::invalid_argument(
            "equilibrium_rstar: negative reward-plus-risk bracket is economically inadmissible");
    const double x = bracket / k;
    // stable form of (-1 + sqrt(1+4x))/2
    return 2.0 * x / (1.0 + std::sqrt(1.0 + 4.0 * x));
}

// Convenience wrapper: by translation invariance the spot terms cancel, so
// E_P<H*,S1> + rho(<H*,S1>) equals E_P<H*,dS> + rho(<H*,dS>).
inline double equilibrium_rstar(const Economy& e, const MarketModel& model,
                                const WeightingMeasure& mu, const Strategy& market_portfolio) {
    const Matrix pnl = market_pnl(model);
    if (market_portfolio.h.size() != pnl.cols)
        throw std::invalid_argument("equilibrium_rstar: strategy dimension mismatch");
    std::vector<double> w(pnl.rows, 0.0);
    double expectation = 0.0;
    for (std::size_t row = 0; row < pnl.rows; ++row) {
        double v = 0.0;
        for (std::size_t i = 0; i < pnl.cols; ++i) v += market_portfolio.h[i] * pnl(row, i);
        w[row] = v;
        expectation += model.scenarios.weights[row] * v;
    }
    const double risk = spectral_risk(Sample{std::move(w), model.scenarios.weights}, mu);
    return equilibrium_rstar(e, expectation, risk);
}

// Agent allocations h_n = H* (W_n/a_n) / sum(W/a). The last agent takes the
// exact remainder so the allocations clear the market bit-for-bit.
inline std::vector<Strategy> agent_allocations(const Economy& e, const Strategy& market_portfolio) {
    const double k = risk_tolerance_sum(e);
    const std::size_t n_agents = e.agent_count();
    const std::size_t d = market_portfolio.h.size();
    std::vector<Strategy> out(n_agents);
    std::vector<double> assigned(d, 0.0);
    for (std::size_t n = 0; n + 1 < n_agents; ++n) {
        const double share = e.endowments[n] / e.aversions[n] / k;
        out[n].h.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            out[n].h[i] = share * market_portfolio.h[i];
            assigned[i] += out[n].h[i];
        }
    }
    out[n_agents - 1].h.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        out[n_agents - 1].h[i] = market_portfolio.h[i] - assigned[i];
    return out;
}

} // namespace crisk
