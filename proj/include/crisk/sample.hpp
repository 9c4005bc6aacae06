#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace crisk {

inline constexpr double kWeightSumTol = 1e-12;

// Neumaier-compensated sum: keeps probability-mass checks honest for large T,
// where a naive left-to-right sum drifts past the 1e-12 budget on its own.
inline double compensated_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

// Discrete distribution of a discounted P&L: one value per scenario with a
// probability weight. Weights are nonnegative and sum to 1.
struct Sample {
    std::vector<double> values;
    std::vector<double> weights;

    std::size_t size() const { return values.size(); }
};

inline void validate_sample(const Sample& s) {
    if (s.values.empty())
        throw std::invalid_argument("Sample: need at least one scenario");
    if (s.values.size() != s.weights.size())
        throw std::invalid_argument("Sample: values/weights length mismatch");
    for (double v : s.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("Sample: non-finite value");
    for (double w : s.weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("Sample: weights must be nonnegative");
    if (std::abs(compensated_sum(s.weights) - 1.0) > kWeightSumTol)
        throw std::invalid_argument("Sample: weights must sum to 1");
}

inline Sample make_sample(std::vector<double> values, std::vector<double> weights) {
    Sample s{std::move(values), std::move(weights)};
    validate_sample(s);
    return s;
}

inline Sample uniform_sample(std::vector<double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("Sample: need at least one scenario");
    return make_sample(std::move(values), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

} // namespace crisk
