#pragma once

#include <stdexcept>
#include <string>

namespace crisk {

// Malformed or unreadable input data. The CLI maps this to exit status 4.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Expected discounted P&L vector is zero: no reward direction to optimize.
class degenerate_reward_error : public data_error {
public:
    explicit degenerate_reward_error(const std::string& what) : data_error(what) {}
};

// A nonzero strategy with nonpositive risk exists on the scenario set, so
// the frontier problem is unbounded (the positive-risk assumption fails).
class nonpositive_risk_error : public data_error {
public:
    explicit nonpositive_risk_error(const std::string& what) : data_error(what) {}
};

// Iterative solver exhausted its budget. The CLI maps this to exit status 3.
class non_convergence_error : public std::runtime_error {
public:
    non_convergence_error(const std::string& what, long iterations,
                          double best_objective, double grad_norm)
        : std::runtime_error(what),
          iterations(iterations),
          best_objective(best_objective),
          grad_norm(grad_norm) {}

    long iterations;
    double best_objective;
    double grad_norm;
};

} // namespace crisk
