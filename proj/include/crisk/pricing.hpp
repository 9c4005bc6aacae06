#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "capm.hpp"
#include "errors.hpp"
#include "extreme.hpp"
#include "rng.hpp"
#include "weighting.hpp"

namespace crisk {

// Tabulated payoff: piecewise-linear in the terminal underlier value, flat
// beyond the first and last knots. Knots are strictly increasing.
struct PayoffTable {
    std::vector<double> s; // terminal values
    std::vector<double> f; // discounted payoffs
};

inline void validate_payoff_table(const PayoffTable& t) {
    if (t.s.size() != t.f.size() || t.s.size() < 2)
        throw std::invalid_argument("PayoffTable: need at least two (s, f) rows");
    for (std::size_t i = 0; i + 1 < t.s.size(); ++i)
        if (!(t.s[i] < t.s[i + 1]))
            throw std::invalid_argument("PayoffTable: s column must be strictly increasing");
    for (std::size_t i = 0; i < t.s.size(); ++i)
        if (!std::isfinite(t.s[i]) || !std::isfinite(t.f[i]))
            throw std::invalid_argument("PayoffTable: non-finite entry");
}

inline double payoff_table_value(const PayoffTable& t, double s1) {
    if (s1 <= t.s.front()) return t.f.front();
    if (s1 >= t.s.back()) return t.f.back();
    std::size_t hi = 1;
    while (t.s[hi] < s1) ++hi;
    const double w = (s1 - t.s[hi - 1]) / (t.s[hi] - t.s[hi - 1]);
    return t.f[hi - 1] + w * (t.f[hi] - t.f[hi - 1]);
}

// Right derivative; knots themselves take the slope of the segment to the right.
inline double payoff_table_right_deriv(const PayoffTable& t, double s1) {
    if (s1 < t.s.front() || s1 >= t.s.back()) return 0.0;
    std::size_t hi = 1;
    while (t.s[hi] <= s1) ++hi;
    return (t.f[hi] - t.f[hi - 1]) / (t.s[hi] - t.s[hi - 1]);
}

enum class PayoffKind { VanillaCall, VanillaPut, Custom };

// A contingent claim on one underlier. The payoff function emits the
// *discounted* payoff F = f(S1); any discount factor lives inside f.
struct ClaimSpec {
    PayoffKind kind = PayoffKind::Custom;
    double strike = 0.0;
    std::size_t underlier = 0; // asset column in the scenario set
    double s0 = 0.0;           // spot of the underlier
    std::function<double(double)> payoff;       // custom
    std::function<double(double)> payoff_deriv; // custom, right derivative
};

inline ClaimSpec make_call(std::size_t underlier, double s0, double strike) {
    if (!(s0 > 0.0)) throw std::invalid_argument("make_call: spot must be positive");
    return ClaimSpec{PayoffKind::VanillaCall, strike, underlier, s0, {}, {}};
}

inline ClaimSpec make_put(std::size_t underlier, double s0, double strike) {
    if (!(s0 > 0.0)) throw std::invalid_argument("make_put: spot must be positive");
    return ClaimSpec{PayoffKind::VanillaPut, strike, underlier, s0, {}, {}};
}

inline ClaimSpec make_custom(std::size_t underlier, double s0,
                             std::function<double(double)> payoff,
                             std::function<double(double)> payoff_deriv = {}) {
    if (!(s0 > 0.0)) throw std::invalid_argument("make_custom: spot must be positive");
    if (!payoff) throw std::invalid_argument("make_custom: payoff function required");
    return ClaimSpec{PayoffKind::Custom, 0.0, underlier, s0, std::move(payoff),
                     std::move(payoff_deriv)};
}

inline ClaimSpec make_tabulated(std::size_t underlier, double s0, PayoffTable table) {
    validate_payoff_table(table);
    auto shared = std::make_shared<PayoffTable>(std::move(table));
    return make_custom(
        underlier, s0, [shared](double s1) { return payoff_table_value(*shared, s1); },
        [shared](double s1) { return payoff_table_right_deriv(*shared, s1); });
}

inline double claim_payoff(const ClaimSpec& c, double s1) {
    double v = 0.0;
    switch (c.kind) {
        case PayoffKind::VanillaCall: v = std::max(s1 - c.strike, 0.0); break;
        case PayoffKind::VanillaPut: v = std::max(c.strike - s1, 0.0); break;
        case PayoffKind::Custom: v = c.payoff(s1); break;
    }
    if (!std::isfinite(v)) throw data_error("claim payoff evaluated to a non-finite value");
    return v;
}

// Right derivative of the payoff; *at_kink is set when s1 sits exactly on a
// call/put strike, where only a subgradient exists.
inline double claim_payoff_right_deriv(const ClaimSpec& c, double s1, bool* at_kink = nullptr) {
    switch (c.kind) {
        case PayoffKind::VanillaCall:
            if (at_kink && s1 == c.strike) *at_kink = true;
            return s1 >= c.strike ? 1.0 : 0.0;
        case PayoffKind::VanillaPut:
            if (at_kink && s1 == c.strike) *at_kink = true;
            return s1 >= c.strike ? 0.0 : -1.0;
        case PayoffKind::Custom:
            if (!c.payoff_deriv)
                throw std::invalid_argument("claim has no derivative for sensitivity");
            return c.payoff_deriv(s1);
    }
    return 0.0;
}

namespace detail {

inline std::vector<double> claim_underlier_returns(const ClaimSpec& claim,
                                                   const ScenarioSet& scenarios) {
    validate_scenarios(scenarios);
    if (scenarios.units != OutcomeUnits::Returns)
        throw std::invalid_argument("pricing: scenarios must be in return units");
    if (claim.underlier >= scenarios.asset_count())
        throw std::invalid_argument("pricing: claim underlier not present in scenarios");
    return scenarios.outcomes.col(claim.underlier);
}

} // namespace detail

// NBC price of the claim under the contact kernel:
//   V = E_P f(S0(1+r)) / (1+R*) + E_Q f(S0(1+r)) R*/(1+R*).
inline double nbc_price(const ClaimSpec& claim, const ContactKernel& ck,
                        const ScenarioSet& scenarios) {
    const auto returns = detail::claim_underlier_returns(claim, scenarios);
    if (ck.q.size() != returns.size())
        throw std::invalid_argument("nbc_price: kernel/scenario size mismatch");
    double ep = 0.0, eq = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double f = claim_payoff(claim, claim.s0 * (1.0 + returns[t]));
        ep += scenarios.weights[t] * f;
        eq += ck.q[t] * f;
    }
    const double a = 1.0 / (1.0 + ck.r_star);
    return a * ep + (1.0 - a) * eq;
}

struct SensitivityResult {
    double value = 0.0;
    long kink_hits = 0; // scenarios landing exactly on a payoff kink
};

// dV/dS0 = E_P (1+r) f'(S0(1+r)) / (1+R*) + E_Q (1+r) f'(S0(1+r)) R*/(1+R*),
// with the right derivative at kinks.
inline SensitivityResult nbc_sensitivity(const ClaimSpec& claim, const ContactKernel& ck,
                                         const ScenarioSet& scenarios) {
    const auto returns = detail::claim_underlier_returns(claim, scenarios);
    if (ck.q.size() != returns.size())
        throw std::invalid_argument("nbc_sensitivity: kernel/scenario size mismatch");
    SensitivityResult out;
    double ep = 0.0, eq = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double gross = 1.0 + returns[t];
        bool kink = false;
        const double slope = claim_payoff_right_deriv(claim, claim.s0 * gross, &kink);
        if (kink) ++out.kink_hits;
        ep += scenarios.weights[t] * gross * slope;
        eq += ck.q[t] * gross * slope;
    }
    const double a = 1.0 / (1.0 + ck.r_star);
    out.value = a * ep + (1.0 - a) * eq;
    return out;
}

// (x_t, y_t) pairs for (underlier return, index return) with probabilities nu.
struct PairData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> nu;
};

inline void validate_pair_data(const PairData& p) {
    if (p.x.empty() || p.x.size() != p.y.size() || p.x.size() != p.nu.size())
        throw std::invalid_argument("PairData: inconsistent columns");
}

struct PriceEstimate {
    double value = 0.0;
    std::optional<double> std_err; // reported by the Monte Carlo paths
};

namespace detail {

inline PriceEstimate empirical_price_exact(const ClaimSpec& claim, const WeightingMeasure& mu,
                                           double r_star, const PairData& pairs) {
    const auto q = extreme_measure(Sample{pairs.y, pairs.nu}, mu);
    double ep = 0.0, eq = 0.0;
    for (std::size_t t = 0; t < pairs.x.size(); ++t) {
        const double f = claim_payoff(claim, claim.s0 * (1.0 + pairs.x[t]));
        ep += pairs.nu[t] * f;
        eq += q.q[t] * f;
    }
    const double a = 1.0 / (1.0 + r_star);
    return PriceEstimate{a * ep + (1.0 - a) * eq, std::nullopt};
}

template <typename DrawPair>
inline PriceEstimate empirical_price_groups(const ClaimSpec& claim, double r_star, int alpha,
                                            int beta, bool argmin_form, long k_groups,
                                            DrawPair&& draw, Rng& rng) {
    const double a = 1.0 / (1.0 + r_star);
    const double b = 1.0 - a;
    std::vector<double> xs(alpha), ys(alpha), fs(alpha);
    std::vector<std::size_t> sel;
    double mean = 0.0, m2 = 0.0;
    for (long g = 0; g < k_groups; ++g) {
        for (int l = 0; l < alpha; ++l) {
            const auto [x, y] = draw(rng);
            xs[l] = x;
            ys[l] = y;
            fs[l] = claim_payoff(claim, claim.s0 * (1.0 + x));
        }
        double p_term = 0.0;
        for (int l = 0; l < alpha; ++l) p_term += fs[l];
        p_term /= static_cast<double>(alpha);

        double q_term = 0.0;
        if (argmin_form) {
            std::size_t best = 0;
            for (int l = 1; l < alpha; ++l)
                if (ys[l] < ys[best]) best = static_cast<std::size_t>(l);
            q_term = fs[best];
        } else {
            smallest_by_y(ys, static_cast<std::size_t>(beta), sel);
            for (std::size_t pos : sel) q_term += fs[pos];
            q_term /= static_cast<double>(beta);
        }
        const double v = a * p_term + b * q_term;
        // Welford running moments across groups
        const double delta = v - mean;
        mean += delta / static_cast<double>(g + 1);
        m2 += delta * (v - mean);
    }
    PriceEstimate out;
    out.value = mean;
    out.std_err = k_groups > 1 ? std::sqrt(m2 / static_cast<double>(k_groups - 1) /
                                           static_cast<double>(k_groups))
                               : 0.0;
    return out;
}

} // namespace detail

// Empirical NBC price. Dispatches on the measure family:
//   Dirac/Atomic      exact reweighting of the T pairs by Psi-increments
//   BetaFamily (int)  K groups of alpha draws; order-statistic selection,
//                     argmin form when beta = 1; std_err reported
inline PriceEstimate empirical_price(const ClaimSpec& claim, const WeightingMeasure& mu,
                                     double r_star, const PairData& pairs, std::uint64_t seed,
                                     long k_groups = 0) {
    validate_pair_data(pairs);
    if (!(r_star >= 0.0)) throw std::invalid_argument("empirical_price: r_star must be >= 0");
    if (std::holds_alternative<DiracWeighting>(mu) || std::holds_alternative<AtomicWeighting>(mu))
        return detail::empirical_price_exact(claim, mu, r_star, pairs);

    const auto& bf = std::get<BetaFamilyWeighting>(mu);
    const double ar = std::round(bf.alpha);
    const double br = std::round(bf.beta);
    if (std::abs(bf.alpha - ar) > 1e-9 || std::abs(bf.beta - br) > 1e-9 || ar < 1.0 || br < 1.0)
        throw std::invalid_argument(
            "empirical_price: Monte Carlo path needs integer BetaFamily parameters");
    if (k_groups < 1)
        throw std::invalid_argument("empirical_price: Monte Carlo path needs k_groups >= 1");
    const int alpha = static_cast<int>(ar);
    const int beta = static_cast<int>(br);
    DiscreteSampler sampler(pairs.nu);
    Rng rng(seed);
    auto draw = [&](Rng& r) {
        const std::size_t t = sampler.sample(r);
        return std::pair<double, double>{pairs.x[t], pairs.y[t]};
    };
    return detail::empirical_price_groups(claim, r_star, alpha, beta, beta == 1, k_groups, draw,
                                          rng);
}

// Monte Carlo path over an arbitrary pair sampler (generation methods that
// draw directly rather than tabulating pairs).
inline PriceEstimate empirical_price(const ClaimSpec& claim, const WeightingMeasure& mu,
                                     double r_star, const PairSampler& source, std::uint64_t seed,
                                     long k_groups) {
    if (!(r_star >= 0.0)) throw std::invalid_argument("empirical_price: r_star must be >= 0");
    const auto* bf = std::get_if<BetaFamilyWeighting>(&mu);
    if (bf == nullptr)
        throw std::invalid_argument(
            "empirical_price: the exact Dirac/Atomic path needs tabulated pairs, not a sampler");
    const double ar = std::round(bf->alpha);
    const double br = std::round(bf->beta);
    if (std::abs(bf->alpha - ar) > 1e-9 || std::abs(bf->beta - br) > 1e-9 || ar < 1.0 || br < 1.0)
        throw std::invalid_argument(
            "empirical_price: Monte Carlo path needs integer BetaFamily parameters");
    if (k_groups < 1)
        throw std::invalid_argument("empirical_price: Monte Carlo path needs k_groups >= 1");
    Rng rng(seed);
    return detail::empirical_price_groups(claim, r_star, static_cast<int>(ar),
                                          static_cast<int>(br), br == 1.0, k_groups, source, rng);
}

struct RiskAdjustment {
    double exact = 0.0;       // V - E_P f
    double first_order = 0.0; // R* E_P (dQ/dP - 1) f = R* (E_Q f - E_P f)
};

// Risk adjustment of the NBC price over the plain P-expectation, exact and
// to first order in R*; the gap between the two is O(R*^2).
inline RiskAdjustment risk_adjustment(const ClaimSpec& claim, const ContactKernel& ck,
                                      const ScenarioSet& scenarios) {
    const auto returns = detail::claim_underlier_returns(claim, scenarios);
    if (ck.q.size() != returns.size())
        throw std::invalid_argument("risk_adjustment: kernel/scenario size mismatch");
    double ep = 0.0, eq = 0.0, first = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double nu = scenarios.weights[t];
        if (ck.q[t] > 0.0 && !(nu > 0.0))
            throw std::invalid_argument(
                "risk_adjustment: extreme measure not absolutely continuous (q > 0 on a "
                "zero-weight scenario)");
        const double f = claim_payoff(claim, claim.s0 * (1.0 + returns[t]));
        ep += nu * f;
        eq += ck.q[t] * f;
        if (nu > 0.0) {
            const double phi = ck.q[t] / nu;
            first += nu * (phi - 1.0) * f;
        }
    }
    const double a = 1.0 / (1.0 + ck.r_star);
    RiskAdjustment out;
    out.exact = a * ep + (1.0 - a) * eq - ep;
    out.first_order = ck.r_star * first;
    return out;
}

} // namespace crisk
