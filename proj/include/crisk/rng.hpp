#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace crisk {

// Deterministic random source. Every sampler below is built directly on the
// raw mt19937_64 output with fixed conversion rules, so a given seed produces
// the same draws on every platform and compiler. std::*_distribution types
// are implementation-defined and must not be used anywhere in the library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t u;
        do {
            u = gen_();
        } while (u >= limit);
        return static_cast<std::size_t>(u % span);
    }

    // Standard normal via Box-Muller; the spare draw is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Index sampler for a fixed non-negative weight vector (need not be
// normalized). Inverse-CDF on the cumulative table, binary search.
class DiscreteSampler {
public:
    explicit DiscreteSampler(const std::vector<double>& weights) {
        if (weights.empty())
            throw std::invalid_argument("DiscreteSampler: empty weight vector");
        cumulative_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0))
                throw std::invalid_argument("DiscreteSampler: negative weight");
            acc += w;
            cumulative_.push_back(acc);
        }
        if (!(acc > 0.0))
            throw std::invalid_argument("DiscreteSampler: total weight must be positive");
        total_ = acc;
    }

    std::size_t sample(Rng& rng) const {
        const double u = rng.uniform() * total_;
        std::size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] > u)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

private:
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

} // namespace crisk
