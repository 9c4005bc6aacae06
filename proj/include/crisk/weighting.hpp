#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace crisk {

// A weighting measure mu on (0,1] defines a spectral (distortion) risk
// measure: the mixture over lambda of Expected Shortfall at level lambda.
// Three shapes cover the families used here:
//   Dirac       point mass at lambda        -> Tail V@R / Expected Shortfall
//   Atomic      finite mixture of atoms     -> mixture of Tail V@Rs
//   BetaFamily  density x^beta (1-x)^(alpha-beta-1) / B(beta+1, alpha-beta)
//               -> Beta V@R; beta = 1 gives Alpha V@R (min of alpha copies)

struct DiracWeighting {
    double lambda = 1.0; // in (0,1]
};

struct WeightAtom {
    double lambda = 1.0; // in (0,1]
    double weight = 1.0; // >= 0, atom weights sum to 1
};

struct AtomicWeighting {
    std::vector<WeightAtom> atoms;
};

struct BetaFamilyWeighting {
    double alpha = 1.0; // > -1
    double beta = 0.0;  // in (-1, alpha)
};

using WeightingMeasure = std::variant<DiracWeighting, AtomicWeighting, BetaFamilyWeighting>;

inline constexpr double kAtomWeightSumTol = 1e-12;

// Tail V@R (Expected Shortfall) of order lambda.
inline WeightingMeasure make_tail(double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("make_tail: lambda must lie in (0,1]");
    return DiracWeighting{lambda};
}

// Finite mixture of Tail V@Rs.
inline WeightingMeasure make_atomic(std::vector<WeightAtom> atoms) {
    if (atoms.empty())
        throw std::invalid_argument("make_atomic: need at least one atom");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.lambda > 0.0 && a.lambda <= 1.0))
            throw std::invalid_argument("make_atomic: atom lambda must lie in (0,1]");
        if (!(a.weight >= 0.0))
            throw std::invalid_argument("make_atomic: atom weight must be nonnegative");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > kAtomWeightSumTol)
        throw std::invalid_argument("make_atomic: atom weights must sum to 1");
    return AtomicWeighting{std::move(atoms)};
}

inline WeightingMeasure make_beta_family(double alpha, double beta) {
    if (!(alpha > -1.0) || !(beta > -1.0) || !(beta < alpha))
        throw std::invalid_argument("make_beta_family: need -1 < beta < alpha");
    return BetaFamilyWeighting{alpha, beta};
}

// Beta V@R with integer parameters: mean of the beta smallest of alpha
// independent copies.
inline WeightingMeasure make_beta(int alpha, int beta) {
    if (alpha < 1 || beta < 1 || beta >= alpha)
        throw std::invalid_argument("make_beta: need integers 1 <= beta < alpha");
    return make_beta_family(static_cast<double>(alpha), static_cast<double>(beta));
}

// Alpha V@R: min of alpha independent copies. alpha = 1 is the plain mean,
// which sits outside the beta < alpha domain and is represented as Dirac(1).
inline WeightingMeasure make_alpha(int alpha) {
    if (alpha < 1) throw std::invalid_argument("make_alpha: alpha must be >= 1");
    if (alpha == 1) return DiracWeighting{1.0};
    return make_beta_family(static_cast<double>(alpha), 1.0);
}

namespace detail {

inline void check_unit_interval(double x, const char* where) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << where << ": argument " << x << " outside [0,1]";
        throw std::domain_error(os.str());
    }
}

// Unnormalized integral of t^(beta-1) (1-t)^(alpha-beta-1) over [x,1].
// Only needed for beta <= 0, where the incomplete beta form is unavailable.
inline double beta_tail_harmonic_integral(double alpha, double beta, double x) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto f = [&](double t) {
        return std::pow(t, beta - 1.0) * std::pow(1.0 - t, alpha - beta - 1.0);
    };
    return integrator.integrate(f, x, 1.0, 1e-12);
}

inline double beta_psi(const BetaFamilyWeighting& m, double x) {
    if (x >= 1.0) {
        // psi(1) = mu({1}) / 1 = 0 for an absolutely continuous mu.
        return 0.0;
    }
    const double a = m.alpha;
    const double b = m.beta;
    if (b > 0.0) {
        // integral_x^1 t^(b-1)(1-t)^(a-b-1) dt / B(b+1, a-b)
        //   = (a/b) * (1 - I_x(b, a-b))
        return (a / b) * boost::math::ibetac(b, a - b, x);
    }
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    return beta_tail_harmonic_integral(a, b, x) / boost::math::beta(b + 1.0, a - b);
}

inline double beta_cumulative_psi(const BetaFamilyWeighting& m, double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    // Psi(z) = mu((0,z]) + z * integral_(z,1] lambda^-1 mu(dlambda)
    const double head = boost::math::ibeta(m.beta + 1.0, m.alpha - m.beta, z);
    return head + z * beta_psi(m, z);
}

} // namespace detail

// psi(x) = integral over [x,1] of lambda^-1 mu(dlambda). Nonincreasing in x;
// the closed lower bound means an atom at x itself is included.
inline double psi(const WeightingMeasure& mu, double x) {
    detail::check_unit_interval(x, "psi");
    struct Visitor {
        double x;
        double operator()(const DiracWeighting& m) const {
            return x <= m.lambda ? 1.0 / m.lambda : 0.0;
        }
        double operator()(const AtomicWeighting& m) const {
            double s = 0.0;
            for (const auto& a : m.atoms)
                if (x <= a.lambda) s += a.weight / a.lambda;
            return s;
        }
        double operator()(const BetaFamilyWeighting& m) const {
            return detail::beta_psi(m, x);
        }
    };
    return std::visit(Visitor{x}, mu);
}

// Psi(z) = integral_0^z psi(x) dx. Nondecreasing and concave with
// Psi(0) = 0, Psi(1) = 1; closed form min(z,lambda)/lambda per atom.
inline double cumulative_psi(const WeightingMeasure& mu, double z) {
    detail::check_unit_interval(z, "cumulative_psi");
    struct Visitor {
        double z;
        double operator()(const DiracWeighting& m) const {
            return std::min(z, m.lambda) / m.lambda;
        }
        double operator()(const AtomicWeighting& m) const {
            double s = 0.0;
            for (const auto& a : m.atoms) s += a.weight * std::min(z, a.lambda) / a.lambda;
            return s;
        }
        double operator()(const BetaFamilyWeighting& m) const {
            return detail::beta_cumulative_psi(m, z);
        }
    };
    return std::visit(Visitor{z}, mu);
}

// Short textual form used in CLI reports, e.g. "tail:0.05" or "beta:10,3".
inline std::string describe(const WeightingMeasure& mu) {
    struct Visitor {
        std::string operator()(const DiracWeighting& m) const {
            std::ostringstream os;
            os << "tail:" << m.lambda;
            return os.str();
        }
        std::string operator()(const AtomicWeighting& m) const {
            std::ostringstream os;
            os << "atomic:";
            for (std::size_t i = 0; i < m.atoms.size(); ++i) {
                if (i) os << ",";
                os << m.atoms[i].lambda << "=" << m.atoms[i].weight;
            }
            return os.str();
        }
        std::string operator()(const BetaFamilyWeighting& m) const {
            std::ostringstream os;
            os << "beta:" << m.alpha << "," << m.beta;
            return os.str();
        }
    };
    return std::visit(Visitor{}, mu);
}

} // namespace crisk
