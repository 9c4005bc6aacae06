#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "extreme.hpp"
#include "matrix.hpp"
#include "scenario.hpp"
#include "spectral.hpp"

namespace crisk {

// Asset holdings in units of shares; entries may be negative (short).
struct Strategy {
    std::vector<double> h;
};

struct SolverOptions {
    double objective_tol = 1e-8;   // relative objective stall tolerance
    double certificate_tol = 1e-6; // relative first-order residual target
    long max_iterations = 50000;
    int patience = 40;             // non-improving steps before the Polyak target shrinks
    int probe_directions = 16;     // certificate probes per radius around the optimum
    std::uint64_t seed = 0;        // probe-direction / tie-perturbation seed
    bool collect_history = false;
};

struct FrontierResult {
    Strategy h_star;                     // scaled so rho(<h*, dS>) = 1
    double r_star = 0.0;                 // reward/risk ratio, slope of the frontier
    double risk_at_opt = 1.0;
    long iterations = 0;
    double grad_norm = 0.0;              // projected norm of the certificate gradient
    double sml_residual = 0.0;           // max_i |E_P dS^i + R* E_Q dS^i|
    double certificate_gap = 0.0;        // |E_Q W* + 1|, extremality slack of the certificate
    std::vector<double> extreme_weights; // certificate extreme measure, per scenario
    std::vector<double> generator_point; // E_Q dS at the optimum, per asset
    bool converged = false;
    double max_feasibility_gap = 0.0;    // max |<h,m> - 1| over accepted iterates
    std::vector<double> objective_history; // best-so-far sequence when collect_history
};

namespace detail {

// rho(<h, dS>) over a fixed scenario P&L matrix, with the vertex subgradient
// -E_Q dS read off the same sorted pass. With uniform scenario weights the
// Psi-increment grid does not depend on h and is precomputed.
class SpectralObjective {
public:
    SpectralObjective(const Matrix& pnl, const std::vector<double>& weights,
                      const WeightingMeasure& mu)
        : pnl_(&pnl), weights_(&weights), mu_(mu) {
        const std::size_t t = pnl.rows;
        const double uw = 1.0 / static_cast<double>(t);
        uniform_ = true;
        for (double w : weights)
            if (std::abs(w - uw) > 1e-15 * (1.0 + uw)) {
                uniform_ = false;
                break;
            }
        if (uniform_) {
            const std::vector<double> sw(t, uw);
            fixed_masses_ = sorted_psi_masses(mu_, sw);
        }
        portfolio_.resize(t);
        order_.resize(t);
        scratch_weights_.resize(t);
    }

    std::size_t scenario_count() const { return pnl_->rows; }
    std::size_t asset_count() const { return pnl_->cols; }

    struct Eval {
        double risk = 0.0;
        std::vector<double> grad; // subgradient of rho, equals -E_Q dS
    };

    Eval evaluate(std::span<const double> h) {
        const auto& mass = masses_for(h);
        const std::size_t t = pnl_->rows;
        const std::size_t d = pnl_->cols;
        Eval out;
        out.grad.assign(d, 0.0);
        double acc = 0.0;
        for (std::size_t p = 0; p < t; ++p) {
            const std::size_t row = order_[p];
            acc += mass[p] * portfolio_[row];
            const double* prow = pnl_->data.data() + row * d;
            for (std::size_t i = 0; i < d; ++i) out.grad[i] -= mass[p] * prow[i];
        }
        out.risk = -acc;
        return out;
    }

    // Vertex extreme measure at h, per original scenario index.
    std::vector<double> extreme_weights(std::span<const double> h) {
        const auto& mass = masses_for(h);
        std::vector<double> q(pnl_->rows, 0.0);
        for (std::size_t p = 0; p < pnl_->rows; ++p) q[order_[p]] = mass[p];
        return q;
    }

private:
    const std::vector<double>& masses_for(std::span<const double> h) {
        const std::size_t t = pnl_->rows;
        const std::size_t d = pnl_->cols;
        for (std::size_t row = 0; row < t; ++row) {
            const double* prow = pnl_->data.data() + row * d;
            double v = 0.0;
            for (std::size_t i = 0; i < d; ++i) v += h[i] * prow[i];
            portfolio_[row] = v;
        }
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return portfolio_[a] < portfolio_[b];
        });
        if (uniform_) return fixed_masses_;
        for (std::size_t p = 0; p < t; ++p) scratch_weights_[p] = (*weights_)[order_[p]];
        variable_masses_ = sorted_psi_masses(mu_, scratch_weights_);
        return variable_masses_;
    }

    const Matrix* pnl_;
    const std::vector<double>* weights_;
    WeightingMeasure mu_;
    bool uniform_ = false;
    std::vector<double> fixed_masses_;
    std::vector<double> variable_masses_;
    std::vector<double> scratch_weights_;
    std::vector<double> portfolio_;
    std::vector<std::size_t> order_;
};

struct BundleEntry {
    std::vector<double> h;
    double risk = 0.0;
    std::vector<double> grad;
};

// min over the simplex of ||target - A theta||^2 by pairwise Frank-Wolfe
// with exact line search; A has one column per bundle entry.
inline std::vector<double> simplex_least_squares(const std::vector<std::vector<double>>& columns,
                                                 const std::vector<double>& target,
                                                 int iterations) {
    const std::size_t j = columns.size();
    const std::size_t d = target.size();
    std::vector<double> theta(j, 0.0);

    // start from the single best column
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < j; ++c) {
        double val = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double r = target[i] - columns[c][i];
            val += r * r;
        }
        if (val < best_val) {
            best_val = val;
            best = c;
        }
    }
    theta[best] = 1.0;

    std::vector<double> resid(d);
    for (std::size_t i = 0; i < d; ++i) resid[i] = target[i] - columns[best][i];

    for (int it = 0; it < iterations; ++it) {
        // gradient of the objective wrt theta_c is -2 <resid, a_c>
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::size_t to = 0, from = 0;
        for (std::size_t c = 0; c < j; ++c) {
            double g = 0.0;
            for (std::size_t i = 0; i < d; ++i) g -= resid[i] * columns[c][i];
            if (g < lo) {
                lo = g;
                to = c;
            }
            if (theta[c] > 0.0 && g > hi) {
                hi = g;
                from = c;
            }
        }
        if (!(hi - lo > 1e-18)) break;
        double bb = 0.0, rb = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double b = columns[to][i] - columns[from][i];
            bb += b * b;
            rb += resid[i] * b;
        }
        if (!(bb > 0.0)) break;
        const double gamma = std::clamp(rb / bb, 0.0, theta[from]);
        if (!(gamma > 0.0)) break;
        theta[to] += gamma;
        theta[from] -= gamma;
        for (std::size_t i = 0; i < d; ++i)
            resid[i] -= gamma * (columns[to][i] - columns[from][i]);
    }
    return theta;
}

} // namespace detail

// Solves min rho(<h, dS>) over {h : E_P<h, dS> = 1} by projected subgradient
// descent with a Polyak-style step, then rescales so the optimal portfolio
// carries unit risk. R* is the attained reward/risk ratio.
//
// The reported extreme_weights are a convex combination of sorted-order
// extreme measures collected at near-optimal iterates and probe points; the
// combination minimizes the first-order residual ||E_P dS + R* E_Q dS|| and
// stays inside the determining set, with its extremality slack reported as
// certificate_gap.
inline FrontierResult optimize(const MarketModel& model, const WeightingMeasure& mu,
                               const SolverOptions& opts = {}) {
    const Matrix pnl = market_pnl(model);
    const std::vector<double>& nu = model.scenarios.weights;
    const std::size_t t = pnl.rows;
    const std::size_t d = pnl.cols;

    // expected discounted P&L per asset
    std::vector<double> mean(d, 0.0);
    for (std::size_t row = 0; row < t; ++row)
        for (std::size_t i = 0; i < d; ++i) mean[i] += nu[row] * pnl(row, i);
    double mean_norm_inf = 0.0, mean_norm2 = 0.0;
    for (double v : mean) {
        mean_norm_inf = std::max(mean_norm_inf, std::abs(v));
        mean_norm2 += v * v;
    }
    double pnl_scale = 0.0;
    for (double v : pnl.data) pnl_scale = std::max(pnl_scale, std::abs(v));
    if (!(mean_norm_inf > 1e-14 * std::max(pnl_scale, 1e-300)))
        throw degenerate_reward_error("optimize: expected discounted P&L is zero, no reward direction");

    auto project = [&](std::vector<double>& h) {
        double hm = 0.0;
        for (std::size_t i = 0; i < d; ++i) hm += h[i] * mean[i];
        const double corr = (1.0 - hm) / mean_norm2;
        for (std::size_t i = 0; i < d; ++i) h[i] += corr * mean[i];
    };
    auto project_grad = [&](const std::vector<double>& g) {
        double gm = 0.0;
        for (std::size_t i = 0; i < d; ++i) gm += g[i] * mean[i];
        std::vector<double> out(d);
        const double corr = gm / mean_norm2;
        for (std::size_t i = 0; i < d; ++i) out[i] = g[i] - corr * mean[i];
        return out;
    };

    // Markowitz direction as the starting point: solve (C + ridge I) h = mean
    std::vector<double> h(d, 0.0);
    {
        Matrix cov(d, d);
        for (std::size_t row = 0; row < t; ++row)
            for (std::size_t i = 0; i < d; ++i) {
                const double di = pnl(row, i) - mean[i];
                for (std::size_t j = 0; j <= i; ++j)
                    cov(i, j) += nu[row] * di * (pnl(row, j) - mean[j]);
            }
        double trace = 0.0;
        for (std::size_t i = 0; i < d; ++i) trace += cov(i, i);
        bool solved = false;
        double ridge = 1e-10 * std::max(trace / static_cast<double>(d), 1e-300);
        for (int attempt = 0; attempt < 4 && !solved; ++attempt, ridge *= 100.0) {
            Matrix chol(d, d);
            solved = true;
            for (std::size_t i = 0; i < d && solved; ++i)
                for (std::size_t j = 0; j <= i && solved; ++j) {
                    double sum = cov(i, j);
                    for (std::size_t k = 0; k < j; ++k) sum -= chol(i, k) * chol(j, k);
                    if (i == j) {
                        const double diag = sum + ridge;
                        if (!(diag > 0.0)) {
                            solved = false;
                            break;
                        }
                        chol(i, j) = std::sqrt(diag);
                    } else {
                        chol(i, j) = sum / chol(j, j);
                    }
                }
            if (!solved) continue;
            // forward/back substitution
            std::vector<double> y(d);
            for (std::size_t i = 0; i < d; ++i) {
                double sum = mean[i];
                for (std::size_t k = 0; k < i; ++k) sum -= chol(i, k) * y[k];
                y[i] = sum / chol(i, i);
            }
            for (std::size_t ii = d; ii-- > 0;) {
                double sum = y[ii];
                for (std::size_t k = ii + 1; k < d; ++k) sum -= chol(k, ii) * h[k];
                h[ii] = sum / chol(ii, ii);
            }
        }
        double hm = 0.0;
        for (std::size_t i = 0; i < d; ++i) hm += h[i] * mean[i];
        if (!solved || !(hm > 0.0) || !std::isfinite(hm)) h = mean;
    }
    project(h);

    detail::SpectralObjective objective(pnl, nu, mu);
    auto check_positive = [&](double risk) {
        if (!(risk > 0.0))
            throw nonpositive_risk_error(
                "optimize: a strategy with nonpositive risk exists on the slice "
                "(the positive-risk assumption fails for this scenario set)");
    };

    auto eval = objective.evaluate(h);
    check_positive(eval.risk);

    FrontierResult result;
    std::vector<double> h_best = h;
    double f_best = eval.risk;
    double f_cur = eval.risk;
    std::vector<double> g_cur = eval.grad;

    std::deque<detail::BundleEntry> bundle;
    const std::size_t bundle_cap = 512;
    auto push_bundle = [&](const std::vector<double>& hh, double ff, const std::vector<double>& gg) {
        bundle.push_back(detail::BundleEntry{hh, ff, gg});
        if (bundle.size() > bundle_cap) bundle.pop_front();
    };
    push_bundle(h, f_cur, g_cur);

    if (opts.collect_history) result.objective_history.push_back(f_best);

    // Certificate assembly over the current bundle: convex weights theta
    // minimizing ||mean - (1/f_best) sum theta_j g_j||, with each entry's
    // supporting-plane slack at h_best appended as a penalized residual
    // dimension. The penalty makes the least squares trade first-order
    // accuracy against the extremality gap of the aggregated measure instead
    // of buying residual with badly non-extreme columns.
    std::vector<double> cert_theta;
    std::vector<const detail::BundleEntry*> cert_entries;
    auto build_certificate = [&]() {
        cert_entries.clear();
        std::vector<std::pair<double, const detail::BundleEntry*>> ranked;
        ranked.reserve(bundle.size());
        for (const auto& e : bundle) {
            // linearization slack of the entry's supporting plane at h_best
            double lin = e.risk;
            for (std::size_t i = 0; i < d; ++i) lin += e.grad[i] * (h_best[i] - e.h[i]);
            ranked.emplace_back(std::max(f_best - lin, 0.0), &e);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        // one column per face: evaluations on the same linearity piece carry
        // bitwise-identical subgradients and would crowd out distinct faces
        std::vector<std::pair<double, const detail::BundleEntry*>> unique_faces;
        for (const auto& cand : ranked) {
            bool seen = false;
            for (const auto& kept : unique_faces)
                if (kept.second->grad == cand.second->grad) {
                    seen = true;
                    break;
                }
            if (!seen) unique_faces.push_back(cand);
            if (unique_faces.size() >= 256) break;
        }
        ranked.swap(unique_faces);
        const std::size_t keep = ranked.size();
        const double r_hat = 1.0 / f_best;
        // a slack of 1e-8 * f_best weighs like a residual of cert_tol * ||m||
        const double kappa = opts.certificate_tol * mean_norm_inf / (1e-8 * f_best);
        std::vector<std::vector<double>> columns;
        columns.reserve(keep);
        for (std::size_t c = 0; c < keep; ++c) {
            cert_entries.push_back(ranked[c].second);
            std::vector<double> col(d + 1);
            for (std::size_t i = 0; i < d; ++i) col[i] = r_hat * ranked[c].second->grad[i];
            col[d] = kappa * ranked[c].first;
            columns.push_back(std::move(col));
        }
        std::vector<double> target(d + 1, 0.0);
        for (std::size_t i = 0; i < d; ++i) target[i] = mean[i];
        cert_theta = detail::simplex_least_squares(columns, target, 4000);
        // aggregated gradient and residual
        std::vector<double> g_hat(d, 0.0);
        for (std::size_t c = 0; c < cert_entries.size(); ++c)
            for (std::size_t i = 0; i < d; ++i) g_hat[i] += cert_theta[c] * cert_entries[c]->grad[i];
        double res_inf = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            res_inf = std::max(res_inf, std::abs(mean[i] - r_hat * g_hat[i]));
        return std::make_pair(res_inf, g_hat);
    };

    const double f_floor = std::max(std::abs(f_best), 1e-300);
    double delta = 0.5 * f_best;
    const double delta_stop = opts.objective_tol * f_floor;
    int since_improvement = 0;
    long iter = 0;
    bool converged = false;
    double max_gap = 0.0;

    while (iter < opts.max_iterations) {
        ++iter;
        const auto gp = project_grad(g_cur);
        double gpn2 = 0.0;
        for (double v : gp) gpn2 += v * v;
        if (gpn2 < 1e-32 * mean_norm2) {
            converged = true; // flat along the slice (e.g. d = 1)
            break;
        }
        const double step = (f_cur - (f_best - delta)) / gpn2;
        for (std::size_t i = 0; i < d; ++i) h[i] -= step * gp[i];
        project(h);
        {
            double hm = 0.0;
            for (std::size_t i = 0; i < d; ++i) hm += h[i] * mean[i];
            max_gap = std::max(max_gap, std::abs(hm - 1.0));
        }

        eval = objective.evaluate(h);
        check_positive(eval.risk);
        f_cur = eval.risk;
        g_cur = eval.grad;
        push_bundle(h, f_cur, g_cur);

        if (f_cur < f_best) {
            const bool sufficient = f_cur < f_best - 0.25 * delta;
            f_best = f_cur;
            h_best = h;
            if (sufficient) since_improvement = 0;
        } else {
            ++since_improvement;
        }
        if (opts.collect_history) result.objective_history.push_back(f_best);

        if (since_improvement > opts.patience) {
            delta *= 0.5;
            since_improvement = 0;
            h = h_best;
            f_cur = f_best;
            eval = objective.evaluate(h);
            g_cur = eval.grad;
            if (delta < delta_stop) {
                converged = true;
                break;
            }
            // once steps are fine, test the first-order certificate
            if (delta < 1e-3 * f_floor) {
                const auto [res_inf, g_hat] = build_certificate();
                if (res_inf <= opts.certificate_tol * mean_norm_inf) {
                    converged = true;
                    break;
                }
            }
        }
    }

    if (!converged) {
        const auto gp = project_grad(g_cur);
        double gpn = 0.0;
        for (double v : gp) gpn += v * v;
        throw non_convergence_error("optimize: iteration budget exhausted", iter, f_best,
                                    std::sqrt(gpn));
    }

    // Probe around the optimum so the certificate sees every adjacent face.
    {
        Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
        double h_norm = 0.0;
        for (double v : h_best) h_norm += v * v;
        h_norm = std::sqrt(std::max(h_norm, 1e-300));
        const double radii[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
        std::vector<double> probe(d);
        for (const double rel : radii) {
            for (int k = 0; k < opts.probe_directions; ++k) {
                for (std::size_t i = 0; i < d; ++i) probe[i] = rng.gaussian();
                auto dir = project_grad(probe); // random direction within the slice
                double dn = 0.0;
                for (double v : dir) dn += v * v;
                dn = std::sqrt(dn);
                if (!(dn > 0.0)) continue;
                for (std::size_t i = 0; i < d; ++i)
                    probe[i] = h_best[i] + rel * h_norm * dir[i] / dn;
                auto pe = objective.evaluate(probe);
                check_positive(pe.risk);
                push_bundle(probe, pe.risk, pe.grad);
            }
        }
    }

    // Column generation toward the first-order condition: the measure that
    // best complements the current aggregate is the extreme measure of the
    // residual-tilted portfolio h_best + tau * residual, swept over scales.
    double res_inf = 0.0;
    std::vector<double> g_hat(d, 0.0);
    {
        double h_norm = 0.0;
        for (double v : h_best) h_norm += v * v;
        h_norm = std::sqrt(std::max(h_norm, 1e-300));
        const double target = opts.certificate_tol * mean_norm_inf;
        std::vector<double> tilted(d);
        for (int round = 0; round < 12; ++round) {
            auto cert = build_certificate();
            res_inf = cert.first;
            g_hat = std::move(cert.second);
            if (res_inf <= target) break;
            const double r_hat = 1.0 / f_best;
            std::vector<double> resid(d);
            double rn = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                resid[i] = mean[i] - r_hat * g_hat[i];
                rn += resid[i] * resid[i];
            }
            rn = std::sqrt(rn);
            if (!(rn > 0.0)) break;
            for (const double rel : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
                const double tau = rel * h_norm / rn;
                for (std::size_t i = 0; i < d; ++i) tilted[i] = h_best[i] + tau * resid[i];
                auto te = objective.evaluate(tilted);
                check_positive(te.risk);
                push_bundle(tilted, te.risk, te.grad);
            }
        }
    }

    // Assemble the certificate measure and normalize the portfolio.
    result.h_star.h.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) result.h_star.h[i] = h_best[i] / f_best;
    result.r_star = 1.0 / f_best;
    result.risk_at_opt = 1.0;
    result.iterations = iter;
    result.converged = true;
    result.max_feasibility_gap = max_gap;
    result.sml_residual = res_inf;
    {
        const auto gproj = project_grad(g_hat);
        double n2 = 0.0;
        for (double v : gproj) n2 += v * v;
        result.grad_norm = std::sqrt(n2);
    }
    result.generator_point.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) result.generator_point[i] = -g_hat[i];

    result.extreme_weights.assign(t, 0.0);
    for (std::size_t c = 0; c < cert_entries.size(); ++c) {
        if (cert_theta[c] <= 1e-14) continue;
        const auto q = objective.extreme_weights(cert_entries[c]->h);
        for (std::size_t row = 0; row < t; ++row)
            result.extreme_weights[row] += cert_theta[c] * q[row];
    }
    {
        double eqw = 0.0;
        for (std::size_t row = 0; row < t; ++row) {
            const double* prow = pnl.data.data() + row * d;
            double w = 0.0;
            for (std::size_t i = 0; i < d; ++i) w += result.h_star.h[i] * prow[i];
            eqw += result.extreme_weights[row] * w;
        }
        result.certificate_gap = std::abs(eqw + 1.0);
    }
    return result;
}

// The efficient frontier is the ray E = R* rho: at risk level c the reward
// is R* c and the strategy is c h*.
inline std::vector<std::pair<double, double>> frontier(const FrontierResult& res,
                                                       const std::vector<double>& c_values) {
    std::vector<std::pair<double, double>> out;
    out.reserve(c_values.size());
    for (double c : c_values) {
        if (!(c >= 0.0))
            throw std::invalid_argument("frontier: risk levels must be nonnegative");
        out.emplace_back(c, res.r_star * c);
    }
    return out;
}

struct SupportProbe {
    double risk = 0.0;
    std::vector<double> generator_point; // E_Q dS for the extreme measure at h
};

// Evaluates rho(<h, dS>) together with the generator point attaining the
// support minimum: <h, E_Q dS> = -rho.
inline SupportProbe support_probe(const MarketModel& model, const WeightingMeasure& mu,
                                  const Strategy& strategy) {
    const Matrix pnl = market_pnl(model);
    if (strategy.h.size() != pnl.cols)
        throw std::invalid_argument("support_probe: strategy dimension mismatch");
    double norm = 0.0;
    for (double v : strategy.h) norm += std::abs(v);
    if (!(norm > 0.0)) throw std::invalid_argument("support_probe: zero strategy");

    std::vector<double> w(pnl.rows, 0.0);
    for (std::size_t row = 0; row < pnl.rows; ++row) {
        double v = 0.0;
        for (std::size_t i = 0; i < pnl.cols; ++i) v += strategy.h[i] * pnl(row, i);
        w[row] = v;
    }
    const Sample portfolio{std::move(w), model.scenarios.weights};
    const auto q = extreme_measure(portfolio, mu);

    SupportProbe out;
    out.generator_point.assign(pnl.cols, 0.0);
    double risk = 0.0;
    for (std::size_t row = 0; row < pnl.rows; ++row) {
        risk -= q.q[row] * portfolio.values[row];
        for (std::size_t i = 0; i < pnl.cols; ++i)
            out.generator_point[i] += q.q[row] * pnl(row, i);
    }
    out.risk = risk;
    return out;
}

} // namespace crisk
