#pragma once

// Shared test utilities: deterministic random inputs and brute-force oracles
// kept independent of the library's computation paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <crisk/rng.hpp>
#include <crisk/sample.hpp>
#include <crisk/weighting.hpp>

namespace testutil {

// ---- independent numeric oracles -----------------------------------------

// Adaptive Simpson quadrature, absolute tolerance.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// psi from the defining tail integral, via the measure's density/atoms only.
inline double psi_oracle(const crisk::WeightingMeasure& mu, double x) {
    if (const auto* d = std::get_if<crisk::DiracWeighting>(&mu))
        return x <= d->lambda ? 1.0 / d->lambda : 0.0;
    if (const auto* a = std::get_if<crisk::AtomicWeighting>(&mu)) {
        double s = 0.0;
        for (const auto& atom : a->atoms)
            if (x <= atom.lambda) s += atom.weight / atom.lambda;
        return s;
    }
    const auto& b = std::get<crisk::BetaFamilyWeighting>(mu);
    const double norm = std::exp(std::lgamma(b.beta + 1.0) + std::lgamma(b.alpha - b.beta) -
                                 std::lgamma(b.alpha + 1.0));
    auto density_over_lambda = [&](double t) {
        return std::pow(t, b.beta - 1.0) * std::pow(1.0 - t, b.alpha - b.beta - 1.0) / norm;
    };
    return integrate(density_over_lambda, x, 1.0, 1e-12);
}

// Exhaustive enumeration of all T^alpha ordered draw tuples from a weighted
// discrete law; returns -E[mean of the beta smallest values].
inline double beta_var_oracle(const std::vector<double>& values,
                              const std::vector<double>& probs, int alpha, int beta) {
    const std::size_t t = values.size();
    std::vector<std::size_t> tuple(alpha, 0);
    double acc = 0.0;
    while (true) {
        double prob = 1.0;
        std::vector<double> draw(alpha);
        for (int l = 0; l < alpha; ++l) {
            prob *= probs[tuple[l]];
            draw[l] = values[tuple[l]];
        }
        std::sort(draw.begin(), draw.end());
        double mean_smallest = 0.0;
        for (int i = 0; i < beta; ++i) mean_smallest += draw[i];
        mean_smallest /= beta;
        acc += prob * mean_smallest;
        int pos = alpha - 1;
        while (pos >= 0 && ++tuple[pos] == t) tuple[pos--] = 0;
        if (pos < 0) break;
    }
    return -acc;
}

// Same enumeration for the risk contribution: per tuple select the beta
// positions with the smallest y (ties broken by draw order, matching the
// estimators) and average the attached x values.
inline double contribution_oracle(const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& probs, int alpha, int beta) {
    const std::size_t t = xs.size();
    std::vector<std::size_t> tuple(alpha, 0);
    double acc = 0.0;
    while (true) {
        double prob = 1.0;
        for (int l = 0; l < alpha; ++l) prob *= probs[tuple[l]];
        std::vector<int> order(alpha);
        for (int l = 0; l < alpha; ++l) order[l] = l;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return ys[tuple[a]] < ys[tuple[b]]; });
        double mean_x = 0.0;
        for (int i = 0; i < beta; ++i) mean_x += xs[tuple[order[i]]];
        mean_x /= beta;
        acc += prob * mean_x;
        int pos = alpha - 1;
        while (pos >= 0 && ++tuple[pos] == t) tuple[pos--] = 0;
        if (pos < 0) break;
    }
    return -acc;
}

// ---- deterministic random inputs ------------------------------------------

inline std::vector<double> random_values(crisk::Rng& rng, std::size_t n, double scale = 2.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

// Random simplex weights bounded away from zero.
inline std::vector<double> random_weights(crisk::Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
        x = 0.05 + rng.uniform();
        total += x;
    }
    for (auto& x : w) x /= total;
    // pin the exact simplex sum
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += w[i];
    w[n - 1] = 1.0 - acc;
    return w;
}

inline crisk::Sample random_sample(crisk::Rng& rng, std::size_t n, bool uniform_weights = false) {
    auto values = random_values(rng, n);
    if (uniform_weights) return crisk::uniform_sample(std::move(values));
    return crisk::make_sample(std::move(values), random_weights(rng, n));
}

// Distinct values: separated by a minimum gap so sorting is unambiguous.
inline crisk::Sample random_distinct_sample(crisk::Rng& rng, std::size_t n,
                                            bool uniform_weights = false) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 2.0 * (2.0 * rng.uniform() - 1.0) + 1e-6 * static_cast<double>(i);
    // shuffle deterministically
    for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
    if (uniform_weights) return crisk::uniform_sample(std::move(v));
    return crisk::make_sample(std::move(v), random_weights(rng, n));
}

// The measure zoo exercised by the property suites.
inline std::vector<crisk::WeightingMeasure> measure_zoo() {
    using namespace crisk;
    return {
        make_tail(0.1),
        make_tail(0.5),
        make_tail(1.0),
        make_alpha(1),
        make_alpha(3),
        make_alpha(10),
        make_beta(5, 2),
        make_atomic({{0.25, 0.5}, {0.75, 0.25}, {1.0, 0.25}}),
        make_atomic({{0.05, 0.3}, {0.5, 0.7}}),
        make_beta_family(3.5, 1.25),
    };
}

} // namespace testutil
