#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "sample.hpp"
#include "weighting.hpp"

namespace crisk {

// Stable ascending order of values: ties keep their original index order,
// so the permutation is deterministic.
inline std::vector<std::size_t> ascending_order(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return idx;
}

// Risk mass per sorted position: mass[p] = Psi(z_p) - Psi(z_{p-1}) where
// z_p accumulates the weights in sorted order. The final grid point is
// pinned to exactly 1, so the masses telescope to Psi(1) - Psi(0) = 1.
inline std::vector<double> sorted_psi_masses(const WeightingMeasure& mu,
                                             std::span<const double> sorted_weights) {
    const std::size_t n = sorted_weights.size();
    std::vector<double> mass(n);
    double z = 0.0;
    double prev_psi = 0.0; // Psi(0)
    for (std::size_t p = 0; p < n; ++p) {
        z += sorted_weights[p];
        const double zp = (p + 1 == n) ? 1.0 : std::min(z, 1.0);
        const double cur = cumulative_psi(mu, zp);
        mass[p] = std::max(cur - prev_psi, 0.0);
        prev_psi = cur;
    }
    return mass;
}

// Spectral risk of a discrete sample:
//   rho_mu(X) = -sum_p x_(p) * (Psi(z_p) - Psi(z_{p-1}))
// with values sorted increasingly and z the cumulative sorted weight.
// Equal values receive interchangeable Psi-mass, so the result does not
// depend on how ties are ordered.
inline double spectral_risk(const Sample& sample, const WeightingMeasure& mu) {
    validate_sample(sample);
    const auto order = ascending_order(sample.values);
    std::vector<double> sorted_weights(order.size());
    for (std::size_t p = 0; p < order.size(); ++p)
        sorted_weights[p] = sample.weights[order[p]];
    const auto mass = sorted_psi_masses(mu, sorted_weights);
    double acc = 0.0;
    for (std::size_t p = 0; p < order.size(); ++p)
        acc += sample.values[order[p]] * mass[p];
    return -acc;
}

} // namespace crisk
